"""Lattice ball combinatorics.

Walks through the exact counting identities of graph balls in Z^3: the
sphere of radius R holds 4R^2 + 2 vertices, the ball (4R^3 + 6R^2 + 8R + 3)/3,
and the boundary of a ball is exactly its outermost sphere.
"""

from tfdw_lattice import ball, ball_volume_formula, set_boundary, sphere, sphere_size_formula

origin = (0, 0, 0)

print("R |  sphere  4R^2+2 |   ball  formula")
for radius in range(1, 11):
    s = len(sphere(origin, radius))
    b = len(ball(origin, radius))
    print(f"{radius:2d} | {s:7d} {sphere_size_formula(radius):7d} |"
          f" {b:6d} {ball_volume_formula(radius):8d}")
    assert s == sphere_size_formula(radius)
    assert b == ball_volume_formula(radius)

print()
print("the inner vertex boundary of B_3 is exactly the radius-3 sphere:",
      set_boundary(ball(origin, 3)) == sphere(origin, 3))
print("shell decomposition: |B_5| - |B_4| =",
      ball_volume_formula(5) - ball_volume_formula(4),
      "= |dB_5| =", sphere_size_formula(5))
