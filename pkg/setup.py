from setuptools import find_packages, setup

setup(
    name='gosszeta',
    version='0.1.0',
    packages=find_packages(),
    include_package_data=True,
    install_requires=[
        'click',
        'numpy',
        'sympy'
    ],
    extras_require={
        'tests': [
            'pytest',
            'hypothesis'
        ]
    },
    entry_points={
        'console_scripts': [
            'gosszeta=gosszeta.scripts.gosszeta:run'
        ]
    }
)
