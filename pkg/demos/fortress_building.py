# coding: utf-8

# # Building a fortress
#
# A reduced hypergraph indexed by the leaves of a [k, M]-tree.  The builder
# extracts an arity-m subtree and picks one vertex per pair so that every
# triple of leaves is covered by an edge: a fortress, which is the same as a
# reduced clique on the chosen leaves.

# In[1]:

from fractions import Fraction

from boxlab.builder import FortressBuildFailed, build_fortress
from boxlab.constants import compute_constants
from boxlab.reduced import ReducedHypergraph, fortress_to_clique, is_reduced_clique, verify_fortress
from boxlab.systems import KMTree

T = KMTree.full(2, 4)
A = ReducedHypergraph.random(T.leaves, 2, 0.995, seed=4)

# In[2]:

try:
    res = build_fortress(A, T, r=2, m=2, eps=Fraction(1, 2), seed=0, retries=200)
except FortressBuildFailed as exc:
    print("failed at", exc.stage, "-", exc.detail)
else:
    print("subtree leaves:", res.tree.leaves)
    print("violations:", verify_fortress(A, res.fortress))
    K = fortress_to_clique(res.fortress)
    print("clique order", len(K.indices), "valid", is_reduced_clique(A, K))

# The guarantee only kicks in at enormous sizes.  The constants show why.

# In[3]:

t = compute_constants(2, Fraction(1, 2), 2, 2)
print("M =", t.M)
print("eta = (1/4)^N with N of", t.eta_exponent.bit_length(), "bits")
print(compute_constants(3, Fraction(1, 2), 3, 2).note)
