import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SYMSQ_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "symsq._core",
                ["src/symsq/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
