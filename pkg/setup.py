import os

import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernel bit-identical to the pure
# numpy fallback: FMA contraction would round mul/add pairs differently.
compile_args = ["-O3", "-ffp-contract=off"]
link_args = []
if not os.environ.get("TIPHARVEST_NO_OPENMP"):
    compile_args.append("-fopenmp")
    link_args.append("-fopenmp")

extensions = [
    Extension(
        "tipharvest._bellman",
        ["src/tipharvest/_bellman.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
