"""Build script: compiles the optional alignment speedup extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so compilation failures only cost speed, not functionality.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wikimim._alignment._speedups",
                sources=["src/wikimim/_alignment/_speedups.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
