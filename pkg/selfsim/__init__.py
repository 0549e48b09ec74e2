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

"""
Self-similar profiles of the coagulation equation for rate kernels
M{K = 2 + eps*W} close to constant: the profile and prefactor
solvers, the weighted Laplace-transform norms, the bilinear and
linearized operators of the transformed equation, the representation
measure of I{W}, the near-zero boundary layer, and the suites of
numerical checks that tie them together.

Start with L{kernels.KernelSpec} and L{solver.solve_selfsim}, or with
the C{selfsim} command in L{cli}.
"""

def store(url, **kw):
    """
    Returns a L{database.ResultsStore} for the RFC-1738 I{url},
    e.g., C{sqlite:///results.db}. Call its C{waitUntilRunning} method
    and wait for the C{Deferred} before using it, and its C{shutdown}
    method when you're done.

    Keywords go to C{SA.create_engine}.
    """
    from selfsim.database import ResultsStore
    return ResultsStore(url, **kw)
