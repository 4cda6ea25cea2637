from setuptools import Extension, setup
from Cython.Build import cythonize

# No -ffast-math: the compiled kernels must be bit-identical to the pure-Python
# fallback, so float operations may not be reassociated.
extensions = [
    Extension(
        "solverstress._kernels._speedups",
        ["src/solverstress/_kernels/_speedups.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
)
