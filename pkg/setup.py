from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = [
    Extension(
        "parq.sim._engine",
        ["src/parq/sim/_engine.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        ext_modules,
        compiler_directives={"language_level": "3"},
    )
)
