"""Out-of-order arrival and retraction.

The same stream is run in order and with seeded random delays; as long as
delays stay below wm - step, the final (fully stable) intervals agree.
Then a retraction mid-stream removes the evidence for an interval.
"""

import importlib.resources as res

from evrec import (
    DelayModel,
    Engine,
    EngineConfig,
    InputRecord,
    language,
    run_stream,
    simulate_delays,
)

text = (res.files("evrec") / "rules" / "surveillance.rtec").read_text()
ed, _ = language.load(text)
ed = ed.with_domain("entity", ("p1",))

recs = [
    InputRecord(id="w", kind="interval", name="walking", args=("p1",),
                value="true", start=5, end=30),
    InputRecord(id="d", kind="event", name="disappear", args=("p1",), t=42),
]

cfg = EngineConfig(wm=30, step=10)


def finals(results):
    return sorted(
        (e.name, e.start, e.end)
        for r in results
        for e in r.entries
        if e.stability == "final"
    )


_e, in_order = run_stream(ed, cfg, recs, last_q=90)
delayed = simulate_delays(recs, DelayModel("uniform", 0, 20, seed=1))
_e, shuffled = run_stream(ed, cfg, delayed, last_q=90)
print("in order :", finals(in_order))
print("delayed  :", finals(shuffled))
assert finals(in_order) == finals(shuffled)

# Revision: retracting the walking interval deletes the person interval.
engine = Engine(ed, EngineConfig(wm=50, step=25))
engine.ingest(recs)
print()
print("before retract:", [(e.name, e.start, e.end) for e in engine.query(25).entries])
engine.ingest([InputRecord(id="w", action="retract")])
print("after retract :", [(e.name, e.start, e.end) for e in engine.query(50).entries])
