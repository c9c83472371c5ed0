from setuptools import setup

setup(
    name="steinlab",
    version="0.1.0",
    description="Random chord diagrams: crossings, simple chords, size-bias couplings and Stein bounds",
    author="Your Name",
    py_modules=[
        "diagram_core",
        "chord_statistics",
        "sizebias",
        "limitlab",
        "harness",
        "helper_functions",
        "main",
    ],
    install_requires=[
        "numpy",
        "scipy",
    ],
    entry_points={
        "console_scripts": ["steinlab=main:main"],
    },
    python_requires=">=3.8",
)
