"""Regenerate scenarios/*.scn from the built-in catalog with explicit literals."""

import pathlib

from ggtool.verify import builtin_scenarios, dump_scenario, parse_scenario

out = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
out.mkdir(exist_ok=True)
for name, sc in builtin_scenarios().items():
    text = dump_scenario(sc)
    assert parse_scenario(text, name).same_as(sc)
    (out / f"{name}.scn").write_text(text)
    print(f"wrote {name}.scn")
