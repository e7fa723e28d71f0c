import pytest

from prefstack.model import Action, ActionKind, Demonstration, TimeStep, secondary_set
from prefstack.synth import bookcase_task, fig4_preset, generate

LB = "bring:long"
SB = "bring:short"
SH = "bring:shelf"


def demo_from_pattern(user_id, pattern):
    """pattern: list of (iterable of secondary tokens, primary id)."""
    steps = tuple(
        TimeStep(secondary_set(*tokens), Action(id=pid, kind=ActionKind.PRIMARY))
        for tokens, pid in pattern
    )
    return Demonstration(user_id=user_id, steps=steps)


def abc_users():
    """The three-user two-event scenario: A boards-first, B and C shelves-first.

    B and C share the shelves-first event identity (shelf plus long board,
    supplied because boards are not in place yet) but order its secondary
    actions differently: B supplies a shelf per side pair, C one shelf for
    all four connections.
    """
    boards = [({LB, SB}, "fr_1"), ((), "fr_2"), ({LB, SB}, "fr_3"), ((), "fr_4")]
    shelves_plain = [({SH}, "sh_1"), ((), "sh_2"), ({SH}, "sh_3"), ((), "sh_4")]
    shelves_first_b = [({SH, LB}, "sh_1"), ((), "sh_2"), ({SH}, "sh_3"), ((), "sh_4")]
    shelves_first_c = [({SH, LB}, "sh_1"), ((), "sh_2"), ((), "sh_3"), ((), "sh_4")]
    a = demo_from_pattern("A", boards + shelves_plain)
    b = demo_from_pattern("B", shelves_first_b + boards)
    c = demo_from_pattern("C", shelves_first_c + boards)
    return a, b, c


@pytest.fixture(scope="session")
def task():
    return bookcase_task()


@pytest.fixture(scope="session")
def fig4_demos(task):
    return generate(fig4_preset(task), task, seed=7)
