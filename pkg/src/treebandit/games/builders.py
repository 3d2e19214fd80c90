"""Benchmark game constructors.

All games are two-player zero-sum; payoffs are stated for player 1.
Information-set keys encode exactly what the acting player has seen, so
the per-player reduction yields the intended decision processes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .efg import Chance, Decision, ExtensiveFormGame, Terminal

MATRIX_PAYOFFS = (
    (-1.0, 1.0),
    (1.0, -0.5),
    (0.9, -1.0),
)


def matrix_game() -> ExtensiveFormGame:
    """Simultaneous 3-action vs 2-action game (row player is player 1)."""
    rows = ("r1", "r2", "r3")
    cols = ("c1", "c2")
    actions = []
    for i, row in enumerate(rows):
        p2 = Decision(
            player=2,
            infoset="p2|",
            actions=[
                (col, Terminal(MATRIX_PAYOFFS[i][j])) for j, col in enumerate(cols)
            ],
        )
        actions.append((row, p2))
    root = Decision(player=1, infoset="p1|", actions=actions)
    return ExtensiveFormGame("matrix", root)


def kuhn_poker() -> ExtensiveFormGame:
    """One-round three-card poker with an ante of 1 and bet size 1."""
    cards = ("J", "Q", "K")
    rank = {c: i for i, c in enumerate(cards)}

    def showdown(c1, c2, pot_each):
        if rank[c1] > rank[c2]:
            return Terminal(float(pot_each))
        return Terminal(float(-pot_each))

    def betting(c1, c2):
        # histories: k k | k b f | k b c | b f | b c
        after_check_bet = Decision(
            player=1,
            infoset=f"p1|{c1}|kb",
            actions=[
                ("f", Terminal(-1.0)),
                ("c", showdown(c1, c2, 2)),
            ],
        )
        after_check = Decision(
            player=2,
            infoset=f"p2|{c2}|k",
            actions=[
                ("k", showdown(c1, c2, 1)),
                ("b", after_check_bet),
            ],
        )
        after_bet = Decision(
            player=2,
            infoset=f"p2|{c2}|b",
            actions=[
                ("f", Terminal(1.0)),
                ("c", showdown(c1, c2, 2)),
            ],
        )
        return Decision(
            player=1,
            infoset=f"p1|{c1}|",
            actions=[("k", after_check), ("b", after_bet)],
        )

    deals = [
        (f"{c1}{c2}", 1.0 / 6.0, betting(c1, c2))
        for c1, c2 in itertools.permutations(cards, 2)
    ]
    return ExtensiveFormGame("kuhn", Chance(deals))


def leduc_poker() -> ExtensiveFormGame:
    """Two-round poker, 3 ranks x 2 suits, bet sizes 2 then 4, two raises
    per round."""
    ranks = ("J", "Q", "K")
    strength = {r: i for i, r in enumerate(ranks)}

    def winner_payoff(c1, c2, pub, pot_each):
        if c1 == pub and c2 != pub:
            return float(pot_each)
        if c2 == pub and c1 != pub:
            return float(-pot_each)
        if strength[c1] > strength[c2]:
            return float(pot_each)
        if strength[c1] < strength[c2]:
            return float(-pot_each)
        return 0.0

    def betting_round(c1, c2, hist, bet, contrib, to_act, raises, on_round_end):
        """One betting round; ``on_round_end(contrib, hist)`` continues.

        ``hist`` is the full public action history (both rounds), part of
        every infoset key so nobody forgets it.  At most two raises per
        round; the second player checking, or any call, ends the round.
        """
        me, other = to_act, 3 - to_act
        my_card = c1 if me == 1 else c2
        infoset = f"p{me}|{my_card}|{hist}"
        actions = []
        if contrib[other] > contrib[me]:
            folder_pay = contrib[me]
            actions.append(
                ("f", Terminal(float(folder_pay) if me == 2 else -float(folder_pay)))
            )
            called = dict(contrib)
            called[me] = contrib[other]
            actions.append(("c", on_round_end(called, hist + "c")))
            if raises < 2:
                raised = dict(contrib)
                raised[me] = contrib[other] + bet
                actions.append(
                    (
                        "r",
                        betting_round(
                            c1, c2, hist + "r", bet, raised, other,
                            raises + 1, on_round_end,
                        ),
                    )
                )
        else:
            if me == 1:
                actions.append(
                    (
                        "k",
                        betting_round(
                            c1, c2, hist + "k", bet, contrib, other,
                            raises, on_round_end,
                        ),
                    )
                )
            else:
                actions.append(("k", on_round_end(contrib, hist + "k")))
            raised = dict(contrib)
            raised[me] = contrib[other] + bet
            actions.append(
                (
                    "r",
                    betting_round(
                        c1, c2, hist + "r", bet, raised, other,
                        raises + 1, on_round_end,
                    ),
                )
            )
        return Decision(player=me, infoset=infoset, actions=actions)

    def public_stage(c1, c2, contrib, hist):
        outcomes = []
        for pub in ranks:
            copies = 2 - (pub == c1) - (pub == c2)
            if copies == 0:
                continue

            def round2_end(contrib2, hist2, pub=pub):
                return Terminal(winner_payoff(c1, c2, pub, contrib2[1]))

            node = betting_round(
                c1, c2, hist + f"/{pub}/", 4, contrib, 1, 0, round2_end
            )
            outcomes.append((pub, float(Fraction(copies, 4)), node))
        return Chance(outcomes)

    def deal_node(c1, c2):
        def round1_end(contrib, hist):
            return public_stage(c1, c2, contrib, hist)

        return betting_round(c1, c2, "", 2, {1: 1, 2: 1}, 1, 0, round1_end)

    deals = []
    for c1 in ranks:
        for c2 in ranks:
            copies = Fraction(2, 6) * (
                Fraction(1, 5) if c1 == c2 else Fraction(2, 5)
            )
            deals.append((f"{c1}{c2}", float(copies), deal_node(c1, c2)))
    return ExtensiveFormGame("leduc", Chance(deals))


def goofspiel(
    k: int = 3, observe_bids: bool = False, prize_order: str = "random"
) -> ExtensiveFormGame:
    """Bidding game over k prize cards with simultaneous sealed bids.

    Players hold hands 1..k; each turn the next prize is revealed, both
    players bid one card, the higher bid wins the prize (split on ties).
    With ``observe_bids`` players see each other's bids; otherwise they
    only observe who won each comparison.  ``prize_order`` is "random"
    (shuffled deck), "ascending" or "descending".  The default
    configuration (k=3, outcome-only observation, shuffled deck) is the
    benchmark preset.
    """
    if k < 2:
        raise ValueError("goofspiel needs at least 2 cards")
    full = tuple(range(1, k + 1))

    def terminal(score_diff):
        return Terminal(float(score_diff))

    def play_turn(hand1, hand2, deck, view1, view2, score_diff):
        if not deck:
            return terminal(score_diff)
        if prize_order == "random":
            outcomes = []
            for prize in deck:
                rest = tuple(c for c in deck if c != prize)
                node = bid_stage(hand1, hand2, rest, prize, view1, view2, score_diff)
                outcomes.append((f"P{prize}", 1.0 / len(deck), node))
            return Chance(outcomes)
        prize = deck[0] if prize_order == "ascending" else deck[-1]
        rest = tuple(c for c in deck if c != prize)
        return bid_stage(hand1, hand2, rest, prize, view1, view2, score_diff)

    def bid_stage(hand1, hand2, deck_rest, prize, view1, view2, score_diff):
        v1 = f"{view1}P{prize}."
        v2 = f"{view2}P{prize}."

        def p2_node(bid1):
            actions2 = []
            for bid2 in hand2:
                h1 = tuple(c for c in hand1 if c != bid1)
                h2 = tuple(c for c in hand2 if c != bid2)
                if bid1 > bid2:
                    delta, out1, out2 = prize, "w", "l"
                elif bid1 < bid2:
                    delta, out1, out2 = -prize, "l", "w"
                else:
                    delta, out1, out2 = 0, "t", "t"
                if observe_bids:
                    nv1 = f"{v1}{bid1}o{bid2}."
                    nv2 = f"{v2}{bid2}o{bid1}."
                else:
                    nv1 = f"{v1}{bid1}{out1}."
                    nv2 = f"{v2}{bid2}{out2}."
                child = play_turn(h1, h2, deck_rest, nv1, nv2, score_diff + delta)
                actions2.append((str(bid2), child))
            return Decision(player=2, infoset=f"p2|{v2}", actions=actions2)

        actions1 = [(str(bid1), p2_node(bid1)) for bid1 in hand1]
        return Decision(player=1, infoset=f"p1|{v1}", actions=actions1)

    root = play_turn(full, full, full, "", "", 0)
    name = f"goofspiel{k}" + ("-bids" if observe_bids else "") + (
        "" if prize_order == "random" else f"-{prize_order}"
    )
    return ExtensiveFormGame(name, root)
