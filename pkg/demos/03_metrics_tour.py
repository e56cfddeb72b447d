"""The five offline measures on small, fully inspectable inputs."""

from polarec import (coverage_entropy, interlist_diversity, precision_at_n,
                     recovery, self_info_novelty)


def main():
    print("=== recovery: normalised rank of the relevant items ===")
    ranking = {1: list(range(1, 101))}
    print(f"relevant item ranked 1st of 100  -> {recovery(ranking, {1: [1]}):.3f}")
    print(f"relevant item ranked 50th of 100 -> {recovery(ranking, {1: [50]}):.3f}")
    print(f"relevant item ranked last        -> {recovery(ranking, {1: [100]}):.3f}")
    print("0.5 is what a random ranker scores; lower is better.")

    print("\n=== precision at N ===")
    lists = {1: [1, 2, 3], 2: [4, 5, 6], 3: [7, 8, 9]}
    judgments = {1: [1, 2], 2: [99], 3: [7]}
    print(f"overlaps 2,0,1 at N=10 -> {precision_at_n(lists, judgments, 10):.3f}")

    print("\n=== coverage entropy (bits) ===")
    concentrated = {u: [7] for u in range(8)}
    spread = {u: [u] for u in range(8)}
    print(f"all lists identical       -> {coverage_entropy(concentrated):.3f}")
    print(f"lists over distinct items -> {coverage_entropy(spread):.3f} "
          f"(= log2(8))")
    print(f"counts (2,1,1)            -> "
          f"{coverage_entropy({1: ['a', 'b'], 2: ['a', 'c']}):.3f} bits")

    print("\n=== inter-list diversity ===")
    lists = {1: ["a", "b"], 2: ["a", "c"], 3: ["d", "e"]}
    print(f"lists [a,b],[a,c],[d,e] -> {interlist_diversity(lists, 2):.4f} (= 5/6)")

    print("\n=== self-information novelty ===")
    print(f"item bought by 4 of 64 test users -> "
          f"{self_info_novelty({1: [7]}, {7: 4}, 64):.1f} bits")
    print(f"item bought by all 64             -> "
          f"{self_info_novelty({1: [7]}, {7: 64}, 64):.1f} bits")


if __name__ == "__main__":
    main()
