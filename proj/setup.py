from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "choiceworks._choiceworks",
    [
        "python/module.cpp",
        "src/names.cpp",
        "src/tree.cpp",
        "src/simplex.cpp",
        "src/convex_cut.cpp",
        "src/zero_finder.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(
    packages=["choiceworks"],
    package_dir={"choiceworks": "python/choiceworks"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
