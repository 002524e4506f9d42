"""Definite values that refuse to multiply.

Prepare the GHZ triple, and later measure x on all three particles,
finding for example (+1, +1, -1).  Between those two boundary events, ask
about the product of y components at two of the sites.  The inference
rule that conditions on both boundaries assigns one outcome probability 1,
so each pairwise y product has a definite value on that run.  The three
values multiply to -1.  Yet the six-factor product of the same three
observables is the identity operator, whose value is +1 with certainty.
Definite intermediate values, inferred this way, do not obey the product
rule.
"""

from ghzlab.prepost import (
    abl_distribution,
    conditionals_check,
    format_elements_proof,
    ghz_x_ensemble,
    product_rule_report,
)
from ghzlab.qsim import Axis, ProductObservable


def main():
    print(__doc__)

    ens = ghz_x_ensemble((1, 1, -1))
    print(format_elements_proof(ens, conditionals_check(ens.pre), product_rule_report(ens)))

    single = ProductObservable.of((0, Axis.Y))
    dist = abl_distribution(ens, single)
    print("for contrast, a single y component is not inferable at all:")
    print(f"  y(A): P(+1) = {dist.probs[1]:.3f}, P(-1) = {dist.probs[-1]:.3f}")

    print("the same failure shows up for every reachable final triple:")
    for triple in ((1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1)):
        report = product_rule_report(ghz_x_ensemble(triple))
        values = ", ".join(f"{e.value:+d}" for e in report.pairwise)
        print(f"  x results {triple}: pairwise values ({values}), "
              f"product {report.pairwise_product:+d}, six-factor {report.six_factor_element.value:+d}")


if __name__ == "__main__":
    main()
