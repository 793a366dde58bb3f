from setuptools import Extension, setup

# The sampling kernel is an optional speedup; the package falls back to the
# vectorized numpy implementation when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "eprkit._kernels._sample",
                ["src/eprkit/_kernels/_sample.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
