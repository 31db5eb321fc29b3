import pytest

from netident.cli import main


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "crossed_diamond.json", "--json", "--seed", "3", "--oracle-samples", "3"],
        ["analyze", "layered.json", "--json", "--oracle-samples", "2"],
        ["counterexample", "crossed_diamond_adversarial.json", "--node", "1", "--measured", "4,5", "--json"],
        ["oracle-test", "open_diamond.json", "--json", "--oracle-samples", "3", "--seed", "9"],
        ["suggest", "open_diamond.json", "--json"],
    ],
)
def test_identical_invocations_give_identical_output(fixtures_dir, capsys, argv):
    argv = [str(fixtures_dir / a) if a.endswith(".json") else a for a in argv]
    first_code = main(argv)
    first = capsys.readouterr().out
    second_code = main(argv)
    assert capsys.readouterr().out == first
    assert first_code == second_code
    assert first.startswith("{")
