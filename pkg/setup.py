"""Build script: compiles the optional Cython integrator core.

The package is fully functional without the extension (a pure-Python twin
of the integrator core is selected at import time), so a failed build of
the extension is downgraded to a warning instead of aborting the install.
Set HCFLOW_PURE_PYTHON=1 to skip the extension on purpose.
"""
import os
import warnings

from setuptools import setup

ext_modules = []
if not os.environ.get("HCFLOW_PURE_PYTHON"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("hcflow._core_cy", ["src/hcflow/_core_cy.pyx"],
                       include_dirs=[np.get_include()])],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build-environment dependent
        warnings.warn(f"Cython core not built ({exc}); pure-Python core will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
