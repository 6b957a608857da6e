import os

from setuptools import Extension, setup


def build_ext_modules():
    """Compile the fast kernels when Cython is available.

    Returns an empty list otherwise so the package installs with the
    numpy fallback backend instead of failing the build.
    """
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        name="cspsa_tomo._kernels",
        sources=[os.path.join("src", "cspsa_tomo", "_kernels.pyx")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=build_ext_modules())
