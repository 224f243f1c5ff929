from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython at build time: install pure-Python only, the kernel
    # selector falls back to the interpreted implementation.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "cashtags._kernel",
                ["src/cashtags/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
