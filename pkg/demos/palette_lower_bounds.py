# coding: utf-8

# # Lower bounds from palettes
#
# A palette is a set of colour patterns (a, b, c) on pairs.  Colouring the
# pairs of [n] at random and keeping the triples whose pattern lies in the
# palette gives a 3-graph whose density on every box is the palette's
# minimum codegree.  If no colouring of K_k realises the palette, the
# 3-graph has no K_k, so the codegree is a lower bound for pi(K_k).

# In[1]:

from boxlab.palette import min_codegree, standard_palette
from boxlab.ramsey import search_palette_colouring

# In[2]:

for name in ("cyclic3", "two_colour_nonmono", "exactly_two_of_three"):
    P = standard_palette(name)
    print(f"{name:22s} patterns={len(P):2d} min codegree={min_codegree(P)}")

# The nonmonochromatic family interpolates: with l colours the codegree is (l-1)/l.

# In[3]:

for ell in range(2, 7):
    print(ell, min_codegree(standard_palette(f"nonmono({ell})")))

# Now the certificates.  The search colours the pairs of K_k one at a time and
# backtracks on the first triple whose pattern falls outside the palette.

# In[4]:

for name, k in (("cyclic3", 4), ("cyclic3", 5), ("two_colour_nonmono", 5), ("two_colour_nonmono", 6)):
    res = search_palette_colouring(standard_palette(name), k)
    print(f"{name:20s} K{k}: {res.verdict.value:10s} nodes={res.nodes_explored}")

# cyclic3 colours K4 but not K5, so pi(K5) >= 1/3.  The two colour palette
# stops at K6, giving pi(K6) >= 1/2.  The K11 certificate for the 2/3 palette
# takes a few seconds more; run `boxlab reproduce eq-results` to see it.
