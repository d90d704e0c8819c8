from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python install: the package falls back to the interpreted engine.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "officesim._kernel",
                ["src/officesim/_kernel.pyx"],
                # -ffp-contract=off: no fused multiply-adds, so float
                # results stay bit-identical to the interpreted engine.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
