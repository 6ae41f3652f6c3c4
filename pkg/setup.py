from setuptools import setup, find_packages

setup(
    name="robust-nonparam",
    version="0.1.0",
    author="Ulkesh Patil",
    author_email="ulkesh13@gmail.com",
    description="Astuteness experiments for k-NN, kernel and histogram classifiers",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.8",
    install_requires=[
        "from_root",
        "tqdm",
        "numpy",
        "scipy",
        "pandas>=1.5",
        "scikit-learn",
        "joblib",
        "matplotlib",
    ],
    entry_points={"console_scripts": ["robust-nonparam=src.pipeline.cli:main"]},
)
