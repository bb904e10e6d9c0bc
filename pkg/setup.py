from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the package falls back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "mmcmax._kernel",
                ["src/mmcmax/_kernel.pyx"],
                # no fast-math / contraction: results must match the Python fallback bit for bit
                extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
