"""Counterfactual worlds that cannot agree.

Suppose an actual run measured x on all three particles and found, say,
(+1, +1, -1).  Consider three counterfactual worlds, each measuring y on
two of the players instead.  Holding the actual x outcomes fixed in each
world (locality toward the actual world) and demanding that a player's y
outcome agree across the two worlds that measure it (locality extended to
pairs of counterfactual worlds) yields six parity constraints over six
+-1 variables.  Multiplying all six cancels every variable and leaves
+1 = -1: the constraint set is unsatisfiable, and removing any single
constraint makes it satisfiable again.
"""

from ghzlab.parity import (
    build_stapp_system,
    drop_one_analysis,
    format_proof,
    solve_enumerate,
    solve_gf2,
)


def main():
    print(__doc__)

    system = build_stapp_system((1, 1, -1))
    print(format_proof(system, solve_gf2(system), drop_one_analysis(system)))

    print("the same contradiction appears for every actual-run outcome triple:")
    for triple in ((1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1)):
        verdicts = {
            "gf2": type(solve_gf2(build_stapp_system(triple))).__name__,
            "enumeration": type(solve_enumerate(build_stapp_system(triple))).__name__,
        }
        print(f"  actual x = {triple}: {verdicts['gf2']} / {verdicts['enumeration']}")


if __name__ == "__main__":
    main()
