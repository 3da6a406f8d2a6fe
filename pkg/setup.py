"""Build script: compiles the optional Cython kernel when Cython is available.

The package is fully functional without the extension; bubblex.kernel falls
back to the pure-Python twin at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bubblex._kernel_cy",
                ["src/bubblex/_kernel_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
