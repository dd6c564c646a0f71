import setuptools

# Root manifest: installs both in-tree distributions (glim_core -> package
# `glim`, glim_experimental -> package `glim_experimental`) in one step.
setuptools.setup(
    name="glim-dev",
    version="0.3.0",
    package_dir={
        "glim": "glim_core/glim",
        "glim_experimental": "glim_experimental/glim_experimental",
    },
    packages=[
        "glim",
        "glim.models",
        "glim.spectral",
        "glim_experimental",
        "glim_experimental.cli",
        "glim_experimental.experiments",
    ],
    python_requires=">=3.8",
    install_requires=[
        "networkx",
        "numpy",
        "scipy",
        "click",
        "rich",
        "matplotlib",
        "tomli; python_version < '3.11'",
    ],
    entry_points={
        "console_scripts": ["glim=glim_experimental.main:cli"],
    },
)
