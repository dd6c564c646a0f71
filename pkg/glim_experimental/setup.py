import setuptools

setuptools.setup(
    name="glim_experimental",
    version="0.3.0",
    description="Seeded experiment presets and the glim command-line tool",
    packages=setuptools.find_packages(),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    install_requires=[
        "glim",
        "click",
        "rich",
        "matplotlib",
        "tomli; python_version < '3.11'",
    ],
    entry_points={
        "console_scripts": ["glim=glim_experimental.main:cli"],
    },
)
