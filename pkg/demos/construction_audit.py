# coding: utf-8

# # Auditing a palette construction
#
# Build the cyclic3 hypergraph on a few hundred vertices and check that the
# box density stays near 1/3 for several families of pair sets.

# In[1]:

from boxlab.construct import AuditSpec, audit_density, build_hypergraph, random_colouring
from boxlab.hypercore import find_clique
from boxlab.palette import standard_palette

P = standard_palette("cyclic3")
phi = random_colouring(200, 3, seed=1)
H = build_hypergraph(phi, P)
print(H.n, "vertices,", H.num_edges, "edges")
print("colour classes:", phi.class_sizes())

# In[2]:

rep = audit_density(H, phi, P, AuditSpec(eta=0.02, seed=1))
for row in rep.rows[:6]:
    print(f"{row.family:8s} {row.label:18s} ratio={float(row.ratio):.4f} holds={row.holds}")
print("worst ratio", float(rep.min_ratio), "all hold:", rep.all_hold)

# The ratios sit close to 1/3 and every family clears d - eta.

# In[3]:

# No K5 can appear, whatever the colouring was.
print(find_clique(H, 5).verdict.value)
print(find_clique(H, 4).witness)
