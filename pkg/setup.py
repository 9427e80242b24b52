import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None and not os.environ.get("DEFMATCH_NO_EXT"):
    extensions = cythonize(
        [
            Extension(
                "defmatch.kernels._fast",
                ["src/defmatch/kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                # the extension is an accelerator only; the package falls
                # back to the numpy kernels when the build is unavailable
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
