from setuptools import setup, find_packages

setup(
    name='spinrelax',
    version='0.1.0',
    description='Relaxation and dephasing of spin ensembles coupled to local '
    'and collective thermal reservoirs',
    packages=find_packages(exclude=['bin', 'conf', 'tests']),
    install_requires=[
        'numpy>=1.17.0',
        'scipy>=1.4.0',
    ],
    extras_require={
        'test': [ 'pytest>=6.0' ],
    },
    entry_points={
        'console_scripts': [ 'spinrelax = spinrelax.cli:main' ],
    },
    python_requires='>=3.7',
    license='MIT'
)
