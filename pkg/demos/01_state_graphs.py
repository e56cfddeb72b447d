"""Polarity-state graphs from a rating history.

Walks through the core data structure: every item splits into a Like state
and a Dislike state, a user's time-ordered ratings become a path through
those states, and aggregating all users' paths gives the weighted AT graph
(consecutive transitions) or AC graph (co-occurrences, order-free).
"""

from polarec import InteractionLog, Polarity, build_ac_graph, build_at_graph
from polarec.stategraph import StateGraph


def state_name(index, state):
    item, pol = index.item_of(state)
    return f"{item}{'L' if pol is Polarity.LIKE else 'D'}"


def main():
    print("=== one user's rating history as a state path ===")
    log = InteractionLog(
        user=[7, 7, 7, 7],
        item=[23, 532, 43, 389],
        rating=[2, 4, 4, 1],           # dislike, like, like, dislike
        timestamp=[1, 10, 21, 23],
    )
    for i, r, t in zip(log.item, log.rating, log.timestamp):
        print(f"  t={t:<3d} item {i:<4d} rated {r} -> "
              f"{'Like' if r > 2.5 else 'Dislike'}")

    at = build_at_graph(log)
    print("\nAT edges (one per consecutive rating pair):")
    for s in range(at.n_states):
        cols, weights = at.out_edges(s)
        for c, w in zip(cols, weights):
            print(f"  {state_name(at.index, s)} -> {state_name(at.index, c)}  weight {w}")

    ac = build_ac_graph(log)
    print(f"\nAC graph stores both directions of every co-rated pair: "
          f"{ac.n_edges} edges, total weight {ac.total_weight} "
          f"(= m*(m-1) for m=4 ratings)")

    print("\n=== maximum-likelihood transition probabilities ===")
    # a small bipartite toy: A1,A2,A3 are states 0..2, B1,B2,B3 are 3..5
    g = StateGraph.from_edges("AT", 6, [
        (0, 3, 8), (0, 4, 2),      # A1 sends 8 users to B1, 2 to B2
        (1, 3, 12),                # A2 sends 12 users to B1
        (2, 4, 2),                 # A3 sends 2 users to B2
    ])
    names = {0: "A1", 1: "A2", 2: "A3", 3: "B1", 4: "B2", 5: "B3"}
    print("forward from A1 (edge weight / out-strength of A1):")
    for t in (3, 4, 5):
        print(f"  P({names[t]} | A1) = {g.forward_prob(0, t):.2f}")
    print("backward to A1 (edge weight / in-strength of target):")
    for t in (3, 4, 5):
        print(f"  P(A1 | {names[t]}) = {g.backward_prob(0, t):.2f}")
    print("\nB2's most probable origin is A1 even though B1 receives more of")
    print("A1's traffic: backward probabilities condition on the destination.")


if __name__ == "__main__":
    main()
