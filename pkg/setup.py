#!/usr/bin/env python
#
# selfsim:
# Self-similar profiles of Smoluchowski's coagulation equation for
# kernels close to constant, with numerical checks of the weighted
# Laplace-transform estimates, representation kernels, linearized
# operator and boundary layer that go with them.
#
# Copyright (C) 2026 by the selfsim developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the
# License. You may obtain a copy of the License at
# 
#   http://www.apache.org/licenses/LICENSE-2.0
# 
# Unless required by applicable law or agreed to in writing,
# software distributed under the License is distributed on an "AS
# IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language
# governing permissions and limitations under the License.


NAME = "selfsim"


### Imports and support
from setuptools import setup

### Define requirements
required = [
    'numpy>=1.20', 'scipy>=1.7',
    'Twisted>=20.3', 'AsynQueue>=0.9.8', 'SQLAlchemy>=1.4',
]


### Define setup options
kw = {'version':           "0.1.0",
      'license':           "Apache License (2.0)",
      'platforms':         "OS Independent",

      'install_requires':  required,
      'python_requires':   ">=3.8",
      'packages':          [
          'selfsim', 'selfsim.test',
      ],
      'test_suite':        "selfsim.test",
      'entry_points':      {
          'console_scripts': [
              "selfsim = selfsim.cli:main",
          ],
      },
}

kw['keywords'] = [
    'coagulation', 'Smoluchowski', 'self-similar', 'Laplace transform',
    'integral equation', 'quadrature', 'twisted', 'asynchronous']


kw['classifiers'] = [
    'Development Status :: 3 - Alpha',

    'Intended Audience :: Science/Research',
    
    'License :: OSI Approved :: Apache Software License',
    'Operating System :: OS Independent',
    'Programming Language :: Python :: 3',
    'Framework :: Twisted',

    'Topic :: Scientific/Engineering :: Mathematics',
    'Topic :: Scientific/Engineering :: Physics',
]

# You get 77 characters. Use them wisely.
kw['description'] =\
"Self-similar coagulation profiles for nearly constant kernels, checked."

kw['long_description'] = """
Numerical tools for self-similar solutions of Smoluchowski's
coagulation equation with rate kernels K = 2 + eps*W that are
homogeneous of degree zero and close to the constant kernel.

selfsim solves the profile equation and the equation for its
prefactor on log-uniform grids, evaluates the weighted
Laplace-transform seminorms used to measure distance from the
constant-kernel profile, applies the bilinear and linearized
operators of the transformed equation and inverts the latter, builds
the measure representing W as a double Laplace transform, and
reconstructs the near-zero boundary layer. Suites of checks record
which of the estimates tying these together hold numerically.

Long computations run in a thread queue from the AsynQueue_ package
under the Twisted_ framework, and runs and check records can be kept
in an SQL database through SQLAlchemy_.

.. _SQLAlchemy: https://www.sqlalchemy.org/

.. _Twisted: https://twistedmatrix.com/trac/

.. _AsynQueue: http://edsuom.com/AsynQueue.html

"""

### Finally, run the setup
setup(name=NAME, **kw)
