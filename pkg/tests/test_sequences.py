import numpy as np
import pytest

from eplkit.sequences import (
    SequenceKind,
    find_kind,
    format_sequence_file,
    generate,
    parse_sequence_file,
)


def test_parse_single_column() -> None:
    vectors = parse_sequence_file("1.0\n0.5\n")
    assert [v.tolist() for v in vectors] == [[1.0], [0.5]]


def test_parse_comments_separators_and_whitespace() -> None:
    text = """
    # leading comment
    0.6, 0.8
      0.0 ; 1.0   # trailing comment

    -0.5	0.5
    """
    vectors = parse_sequence_file(text)
    assert [v.tolist() for v in vectors] == [[0.6, 0.8], [0.0, 1.0], [-0.5, 0.5]]


def test_parse_strips_byte_order_mark() -> None:
    vectors = parse_sequence_file("\ufeff1 0\n0 1\n")
    assert [v.tolist() for v in vectors] == [[1.0, 0.0], [0.0, 1.0]]


def test_parse_empty_text() -> None:
    assert parse_sequence_file("# nothing here\n\n") == []


def test_parse_dimension_mismatch_names_line() -> None:
    with pytest.raises(ValueError, match="Line 3 has 1 entries, expected 2"):
        parse_sequence_file("1 0\n0 1\n0.5\n")


def test_parse_invalid_number_names_line() -> None:
    with pytest.raises(ValueError, match="line 2"):
        parse_sequence_file("1 0\nabc 1\n")


def test_parse_rejects_non_finite() -> None:
    with pytest.raises(ValueError, match="Non-finite"):
        parse_sequence_file("nan 0\n")


def test_format_sequence_file_parses_back() -> None:
    vectors = [np.array([0.1, -0.2]), np.array([1.0, 0.0])]
    parsed = parse_sequence_file(format_sequence_file(vectors))
    assert [v.tolist() for v in parsed] == [[0.1, -0.2], [1.0, 0.0]]
    assert format_sequence_file([]) == ""


def test_find_kind() -> None:
    assert find_kind("Random-Unit") is SequenceKind.RANDOM_UNIT
    assert find_kind(" constant-lower-bound ") is SequenceKind.CONSTANT_LOWER_BOUND
    assert find_kind("spiral") is None


def test_random_unit_vectors_have_unit_norm() -> None:
    vectors = generate(SequenceKind.RANDOM_UNIT, 25, 4, seed=1)
    assert len(vectors) == 25
    np.testing.assert_allclose([np.linalg.norm(v) for v in vectors], 1.0, atol=1e-12)


def test_random_subunit_vectors_stay_in_ball() -> None:
    vectors = generate(SequenceKind.RANDOM_SUBUNIT, 50, 3, seed=2)
    assert all(np.linalg.norm(v) <= 1.0 + 1e-12 for v in vectors)


def test_axis_sequence_cycles() -> None:
    vectors = generate(SequenceKind.AXIS, 5, 2, seed=0)
    assert [v.tolist() for v in vectors] == [[1, 0], [0, 1], [1, 0], [0, 1], [1, 0]]


def test_repeat_sequence_is_constant() -> None:
    vectors = generate(SequenceKind.REPEAT, 4, 3, seed=3)
    for vector in vectors[1:]:
        np.testing.assert_array_equal(vector, vectors[0])


def test_constant_lower_bound_sequence() -> None:
    vectors = generate(SequenceKind.CONSTANT_LOWER_BOUND, 4, 2, seed=0)
    assert [v.tolist() for v in vectors] == [[0.5, 0.0]] * 4


def test_generate_is_deterministic_per_seed() -> None:
    first = generate(SequenceKind.RANDOM_UNIT, 10, 3, seed=7)
    second = generate(SequenceKind.RANDOM_UNIT, 10, 3, seed=7)
    other = generate(SequenceKind.RANDOM_UNIT, 10, 3, seed=8)
    np.testing.assert_array_equal(np.array(first), np.array(second))
    assert not np.array_equal(np.array(first), np.array(other))


def test_generate_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        generate(SequenceKind.RANDOM_UNIT, 0, 2, seed=0)
    with pytest.raises(ValueError):
        generate(SequenceKind.AXIS, 3, 0, seed=0)
    with pytest.raises(ValueError):
        generate(SequenceKind.FROM_FILE, 3, 2, seed=0)
