from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# Same sources the CMake build compiles into ekr_core plus the bindings.
ext = Pybind11Extension(
    "ekrsim._core",
    sources=[
        "src/python/bindings.cpp",
        "src/combinatorics.cpp",
        "src/sampler.cpp",
        "src/pair_stats.cpp",
        "src/report_json.cpp",
        "src/thresholds.cpp",
        "src/stein_chen.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    define_macros=[("EKRSIM_VERSION", '"0.1.0"')],
    extra_compile_args=["-pthread"],
    extra_link_args=["-pthread"],
)

setup(
    packages=["ekrsim"],
    package_dir={"ekrsim": "python/ekrsim"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
