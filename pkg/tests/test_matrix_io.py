"""
矩阵文本格式读写测试
"""
import pytest

from torelli_lab.core.exceptions import LevelViolationError, MatrixParseError, NotSymplecticError
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.utils.matrix_io import (
    format_gluing,
    format_matrix,
    format_symp_element,
    load_gluing,
    load_residue_matrix,
    load_symp_element,
    load_vector,
    parse_matrix_text,
    read_matrix_file,
    write_text,
)


def test_parse_with_comments_and_header():
    text = "# comment\n\ngenus 1 modulus 7\n2 2\n1 2\n# inside\n3 4\n"
    document = parse_matrix_text(text)
    assert document.header == {"genus": 1, "modulus": 7}
    assert (document.rows, document.cols) == (2, 2)
    assert document.entries == (1, 2, 3, 4)
    assert document.resolved_modulus() == 7


def test_entries_may_span_lines():
    document = parse_matrix_text("2 3\n1 2\n3 4 5 6\n")
    assert document.to_array().tolist() == [[1, 2, 3], [4, 5, 6]]


def test_modulus_on_size_line():
    assert parse_matrix_text("1 2 11\n3 4\n").resolved_modulus() == 11


def test_conflicting_moduli():
    document = parse_matrix_text("modulus 5\n1 1 7\n3\n")
    with pytest.raises(MatrixParseError):
        document.resolved_modulus()


@pytest.mark.parametrize(
    "text,line",
    [
        ("2 2\n1 2\n3 x\n", 3),
        ("2 2\n1 2 3\n4 5\n", 3),
        ("2 2\n1 2\n3\n", 3),
        ("# only a comment\n", None),
        ("genus\n2 2\n", 1),
        ("color 3\n1 1\n0\n", 1),
        ("0 2\n", 1),
        ("1 1 1\n0\n", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(MatrixParseError) as excinfo:
        parse_matrix_text(text)
    assert excinfo.value.line == line
    if line is not None:
        assert excinfo.value.message.startswith(f"line {line}: ")


def test_missing_file(tmp_path):
    with pytest.raises(MatrixParseError):
        read_matrix_file(tmp_path / "absent.txt")


def test_load_gluing_sample(samples_dir):
    gluing = load_gluing(samples_dir / "lens_3.txt")
    assert gluing.genus == 1
    assert gluing.gluing.tolist() == [[2, 5], [1, 3]]


def test_gluing_rejects_modulus(samples_dir):
    with pytest.raises(MatrixParseError):
        load_gluing(samples_dir / "lens_level5.txt")


def test_gluing_must_be_symplectic(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 2\n1 1\n1 1\n", encoding="utf-8")
    with pytest.raises(NotSymplecticError):
        load_gluing(path)


def test_load_symp_element_with_level(samples_dir):
    x = load_symp_element(samples_dir / "lens_level5.txt")
    assert x.genus == 1
    assert x.level == 5
    assert x.modulus == 25
    assert x.body.tolist() == [[16, 10], [15, 11]]


def test_symp_element_modulus_argument(samples_dir):
    x = load_symp_element(samples_dir / "identity_g1.txt", modulus=9)
    assert x.modulus == 9
    assert x.body.is_identity


def test_symp_element_needs_modulus(samples_dir):
    with pytest.raises(MatrixParseError):
        load_symp_element(samples_dir / "identity_g1.txt")


def test_symp_element_level_checked(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("genus 1 modulus 25 level 5\n2 2\n1 1\n0 1\n", encoding="utf-8")
    with pytest.raises(LevelViolationError):
        load_symp_element(path)


def test_genus_inferred_from_shape(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("4 4 7\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n", encoding="utf-8")
    assert load_symp_element(path).genus == 2


def test_load_residue_matrix_reduces(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("1 3 5\n-1 7 10\n", encoding="utf-8")
    m = load_residue_matrix(path)
    assert m.entries == (4, 2, 0)


def test_load_vector(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("1 4\n1 0 -2 3\n", encoding="utf-8")
    assert load_vector(path).tolist() == [1, 0, -2, 3]

    path.write_text("2 1\n1\n2\n", encoding="utf-8")
    with pytest.raises(MatrixParseError):
        load_vector(path)


def test_format_matrix_is_parseable():
    m = ResidueMatrix.from_rows([[1, 12], [0, 3]], 13)
    document = parse_matrix_text(format_matrix(m))
    assert document.modulus == 13
    assert document.entries == (1, 12, 0, 3)

    text = format_matrix(IntMatrix.from_rows([[-9, 10], [-10, 11]]), header={"genus": 1})
    assert text.splitlines()[0] == "genus 1"
    assert parse_matrix_text(text).entries == (-9, 10, -10, 11)


def test_written_files_load_back(tmp_path, samples_dir):
    x = load_symp_element(samples_dir / "lens_level5_cube.txt")
    path = tmp_path / "x.txt"
    write_text(path, format_symp_element(x))
    assert load_symp_element(path) == x

    gluing = load_gluing(samples_dir / "s1_x_s2.txt")
    write_text(path, format_gluing(gluing))
    assert load_gluing(path) == gluing
