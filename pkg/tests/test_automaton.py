import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyckrnn.automaton import (ACCEPT, EMPTY, REJECT, DfaState, DyckParams,
                               Token, allowed_tokens, close_bracket, depth,
                               format_string, is_member, open_bracket,
                               parse_string, run, stack_state,
                               stack_state_count, transition, vocabulary)
from conftest import reference_member


def toks(text):
    return parse_string(text)


class TestTransition:
    def test_empty_stack_push(self):
        p = DyckParams(2, 2)
        assert transition(p, EMPTY, open_bracket(1)) == stack_state(1)

    def test_pop_matching(self):
        p = DyckParams(2, 2)
        assert transition(p, stack_state(1, 2), close_bracket(2)) == stack_state(1)

    def test_reject_absorbing(self):
        p = DyckParams(2, 2)
        for token in vocabulary(p.k):
            assert transition(p, REJECT, token) == REJECT

    def test_full_stack_push_rejects(self):
        p = DyckParams(1, 3)
        full = stack_state(1, 1, 1)
        assert transition(p, full, open_bracket(1)) == REJECT

    def test_empty_stack_end_accepts(self):
        p = DyckParams(2, 2)
        assert transition(p, EMPTY, Token("end")) == ACCEPT

    def test_mismatched_close_rejects(self):
        p = DyckParams(2, 2)
        assert transition(p, stack_state(1), close_bracket(2)) == REJECT

    def test_accept_has_no_outgoing(self):
        p = DyckParams(2, 2)
        for token in vocabulary(p.k):
            assert transition(p, ACCEPT, token) == REJECT


class TestRun:
    def test_balanced_pair(self):
        assert run(DyckParams(1, 1), toks("(1 )1 $")) == ACCEPT

    def test_depth_bound_violation(self):
        assert run(DyckParams(1, 1), toks("(1 (1")) == REJECT

    def test_mismatch(self):
        assert run(DyckParams(2, 2), toks("(1 )2")) == REJECT


class TestMembership:
    def test_nested(self):
        assert is_member(DyckParams(2, 2), toks("(2 (1 )1 )2 $"))

    def test_missing_end(self):
        assert not is_member(DyckParams(1, 1), toks("(1 )1"))

    def test_agrees_with_reference_oracle(self):
        """Exhaustive comparison against the cancellation-based checker,
        all bodies up to 7 tokens plus the end mark (k=2, m=2)."""
        p = DyckParams(2, 2)
        alphabet = vocabulary(2)[:-1]
        end = Token("end")
        count = 0
        for n in range(8):
            for body in itertools.product(alphabet, repeat=n):
                string = body + (end,)
                assert is_member(p, string) == reference_member(2, 2, string)
                count += 1
        assert count == sum(4**n for n in range(8))

    def test_misplaced_end_rejected(self):
        p = DyckParams(1, 2)
        string = (Token("end"), open_bracket(1), close_bracket(1))
        assert not is_member(p, string)
        assert not reference_member(1, 2, string)


class TestDepth:
    def test_empty(self):
        assert depth(()) == 0

    def test_two_opens(self):
        assert depth(toks("(1 (2")) == 2

    def test_balanced(self):
        assert depth(toks("(1 )1")) == 0

    def test_negative_for_non_prefix(self):
        assert depth(toks(")1")) == -1

    def test_rejects_end(self):
        with pytest.raises(ValueError):
            depth(toks("(1 $"))

    def test_depth_equals_stack_length_on_member_prefixes(self):
        p = DyckParams(2, 3)
        string = toks("(1 (2 )2 (1 (1 )1 )1 )1 $")
        assert is_member(p, string)
        for t in range(len(string)):
            prefix = string[:t]
            state = run(p, prefix)
            assert state.is_stack
            assert depth(prefix) == len(state.stack)


class TestAllowedTokens:
    def test_empty_stack(self):
        p = DyckParams(2, 3)
        assert allowed_tokens(p, EMPTY) == {open_bracket(1), open_bracket(2),
                                            Token("end")}

    def test_full_stack_only_matching_close(self):
        p = DyckParams(2, 2)
        state = stack_state(1, 2)
        expected = {t for t in vocabulary(2)
                    if transition(p, state, t) != REJECT}
        assert allowed_tokens(p, state) == expected == {close_bracket(2)}

    def test_reject_empty(self):
        assert allowed_tokens(DyckParams(2, 2), REJECT) == frozenset()

    def test_accept_undefined(self):
        with pytest.raises(ValueError):
            allowed_tokens(DyckParams(2, 2), ACCEPT)


@pytest.mark.parametrize("k,m", [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_reachable_state_count(k, m):
    """BFS over transitions reaches exactly the stack states plus accept and
    reject; the stack-state count matches the closed form."""
    p = DyckParams(k, m)
    seen = {EMPTY}
    frontier = [EMPTY]
    while frontier:
        state = frontier.pop()
        for token in vocabulary(k):
            nxt = transition(p, state, token)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    stacks = {s for s in seen if s.is_stack}
    assert len(stacks) == stack_state_count(p) == sum(k**i for i in range(m + 1))
    assert seen == stacks | {ACCEPT, REJECT}


def test_member_prefixes_stay_in_stack_states():
    p = DyckParams(2, 2)
    string = toks("(1 (2 )2 )1 (2 )2 $")
    assert is_member(p, string)
    for t in range(len(string)):
        assert run(p, string[:t]).is_stack


@st.composite
def token_strings(draw, k=2, max_len=10):
    n = draw(st.integers(0, max_len))
    tokens = []
    for _ in range(n):
        kind = draw(st.sampled_from(["open", "close", "end"]))
        idx = draw(st.integers(1, k)) if kind != "end" else 0
        tokens.append(Token(kind, idx))
    return tuple(tokens)


@settings(max_examples=200, deadline=None)
@given(token_strings())
def test_transition_total_and_deterministic(string):
    p = DyckParams(2, 2)
    first = run(p, string)
    second = run(p, string)
    assert first == second
    assert isinstance(first, DfaState)


@settings(max_examples=200, deadline=None)
@given(token_strings(k=3, max_len=9))
def test_membership_matches_reference(string):
    p = DyckParams(3, 2)
    assert is_member(p, string) == reference_member(3, 2, string)


class TestTokenSyntax:
    def test_round_trip(self):
        text = "(1 (2 )2 )1 $"
        assert format_string(parse_string(text)) == text

    def test_parse_error_position(self):
        with pytest.raises(ValueError, match="position 2"):
            parse_string("(1 x2 $")

    def test_end_must_be_last(self):
        with pytest.raises(ValueError, match="position 1"):
            parse_string("$ (1")

    def test_zero_index_rejected(self):
        with pytest.raises(ValueError):
            parse_string("(0")
