"""System plus environment under a random Hamiltonian: the dynamics graph
fills the algebra graph once the time grid resolves every level."""

from opgraph.dynamics import default_t_grid, random_dynamics, verify_proposition2

d = random_dynamics(3, 2, seed=4)
print("levels:", d.levels.round(3))

for points in (1, 2, 4, None):
    grid = default_t_grid(d, points)
    rep = verify_proposition2(d, grid)
    print(f"{len(grid):3d} times: dim G_dyn = {rep.tables['dim_dyn']}, dim G_alg = {rep.tables['dim_alg']}, "
          f"graph residual {rep.residuals['graph_equality']:.1e}, pass={rep.passed}")
