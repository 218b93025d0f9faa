import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off: no FMA fusing, distances must match the numpy oracle
# bit for bit. No -ffast-math for the same reason.
compile_args = ["-O3", "-fopenmp", "-ffp-contract=off"]
link_args = ["-fopenmp"]
if os.environ.get("PDPC_NO_OPENMP"):
    compile_args.remove("-fopenmp")
    link_args = []

extensions = [
    Extension(
        "pdpc._kernels",
        ["src/pdpc/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
