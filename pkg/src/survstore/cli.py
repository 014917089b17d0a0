"""Command-line client.

Every domain subcommand forwards to the HTTP API of a running service
(`survstore serve`), so the CLI stays a thin transport with no business
rules of its own. The exceptions are `serve` itself and `backup
restore`, which must work while no server holds the store lock.

Exit codes: 0 success, 1 domain or transport error, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

DEFAULT_SERVER = "http://127.0.0.1:8741"
SERVER_ENV = "SURVSTORE_SERVER"


def _fail(code: str, message: str) -> None:
    click.echo(f"{code}: {message}", err=True)
    sys.exit(1)


def _client(ctx: click.Context) -> httpx.Client:
    factory = ctx.obj.get("client_factory")
    if factory is not None:
        return factory()
    return httpx.Client(base_url=ctx.obj["server"], timeout=30.0)


def _request(ctx: click.Context, method: str, path: str, **kwargs) -> httpx.Response:
    client = _client(ctx)
    try:
        response = client.request(method, path, **kwargs)
    except httpx.HTTPError as exc:
        _fail("NETWORK_UNREACHABLE", f"cannot reach the service: {exc}")
    finally:
        client.close()
    if response.status_code >= 400:
        try:
            payload = response.json()
            code = payload.get("code", f"HTTP_{response.status_code}")
            message = payload.get("message", response.text)
        except ValueError:
            code, message = f"HTTP_{response.status_code}", response.text
        _fail(code, message)
    return response


def _emit(ctx: click.Context, data, lines_fn=None) -> None:
    if ctx.obj["format"] == "json" or lines_fn is None:
        click.echo(json.dumps(data, indent=2, default=str))
    else:
        for line in lines_fn(data):
            click.echo(line)


def _table(rows: list[dict], columns: list[tuple[str, str]]) -> list[str]:
    if not rows:
        return ["(none)"]
    cells = [[h for h, _ in columns]]
    for row in rows:
        cells.append(["" if row.get(k) is None else str(row.get(k)) for _, k in columns])
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    out = []
    for i, r in enumerate(cells):
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return out


def _num(value, places: int = 3) -> str:
    return "" if value is None else f"{value:.{places}f}"


@click.group()
@click.option("--server", default=lambda: os.environ.get(SERVER_ENV, DEFAULT_SERVER),
              show_default=DEFAULT_SERVER, help="Service base URL.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True, help="Output rendering.")
@click.pass_context
def main(ctx: click.Context, server: str, fmt: str) -> None:
    """Equipment store and survey computations client."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("server", server)
    ctx.obj["format"] = fmt


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int,
              default=lambda: int(os.environ.get("SURVSTORE_PORT", "8741")),
              show_default="8741")
@click.option("--data-dir", default=None, help="Store directory (or SURVSTORE_DATA_DIR).")
@click.option("--console-dir", default=None, help="Built console to serve at /.")
def serve(host: str, port: int, data_dir: str | None, console_dir: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    app = create_app(data_dir=data_dir, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


# -- beacon ---------------------------------------------------------------


@main.group()
def beacon() -> None:
    """Survey beacon register."""


_BEACON_COLS = [
    ("id", "beacon_id"), ("name", "beacon_name"), ("easting", "easting"),
    ("northing", "northing"), ("elev", "elevation"), ("unit", "unit"),
    ("surveyor", "revision_surveyor"), ("date", "revision_date"),
    ("marked", "marked"),
]


def _beacon_lines(data) -> list[str]:
    rows = data if isinstance(data, list) else [data]
    rounded = []
    for r in rows:
        r = dict(r)
        for k in ("easting", "northing", "elevation"):
            if r.get(k) is not None:
                r[k] = f"{r[k]:.3f}"
        rounded.append(r)
    return _table(rounded, _BEACON_COLS)


@beacon.command("add")
@click.option("--name", required=True)
@click.option("--easting", type=float, required=True)
@click.option("--northing", type=float, required=True)
@click.option("--elevation", type=float, default=None)
@click.option("--description", default="")
@click.option("--photo", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Image file to upload and attach.")
@click.option("--surveyor", default="", help="Revision surveyor.")
@click.option("--date", "revision_date", default=None, help="Revision date (ISO).")
@click.option("--marked", is_flag=True, default=False)
@click.pass_context
def beacon_add(ctx, name, easting, northing, elevation, description, photo,
               surveyor, revision_date, marked) -> None:
    """Register a beacon."""
    photo_ref = None
    if photo:
        data = Path(photo).read_bytes()
        up = _request(ctx, "PUT", f"/api/media/{Path(photo).name}", content=data)
        photo_ref = up.json()["ref"]
    body = {
        "name": name, "easting": easting, "northing": northing,
        "elevation": elevation, "description": description,
        "photo_ref": photo_ref, "revision_surveyor": surveyor,
        "revision_date": revision_date, "marked": marked,
    }
    response = _request(ctx, "POST", "/api/beacons", json=body)
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("list")
@click.option("--include-deleted", is_flag=True, default=False)
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.pass_context
def beacon_list(ctx, include_deleted, unit) -> None:
    """List beacons."""
    response = _request(ctx, "GET", "/api/beacons",
                        params={"include_deleted": include_deleted, "unit": unit})
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("search")
@click.argument("query")
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.pass_context
def beacon_search(ctx, query, unit) -> None:
    """Search beacons by name, then description."""
    response = _request(ctx, "GET", "/api/beacons", params={"q": query, "unit": unit})
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("show")
@click.argument("beacon_id", type=int)
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.pass_context
def beacon_show(ctx, beacon_id, unit) -> None:
    """Show one beacon."""
    response = _request(ctx, "GET", f"/api/beacons/{beacon_id}", params={"unit": unit})
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("update")
@click.argument("beacon_id", type=int)
@click.option("--name", "beacon_name", default=None)
@click.option("--easting", type=float, default=None)
@click.option("--northing", type=float, default=None)
@click.option("--elevation", type=float, default=None)
@click.option("--description", default=None)
@click.option("--photo", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Image file to upload and attach.")
@click.option("--surveyor", "revision_surveyor", default=None)
@click.option("--date", "revision_date", default=None)
@click.option("--marked/--unmarked", "marked", default=None)
@click.pass_context
def beacon_update(ctx, beacon_id, photo, **fields) -> None:
    """Update beacon fields."""
    body = {k: v for k, v in fields.items() if v is not None}
    if photo:
        data = Path(photo).read_bytes()
        up = _request(ctx, "PUT", f"/api/media/{Path(photo).name}", content=data)
        body["photo_ref"] = up.json()["ref"]
    if not body:
        raise click.UsageError("nothing to update")
    response = _request(ctx, "PUT", f"/api/beacons/{beacon_id}", json=body)
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("delete")
@click.argument("beacon_id", type=int)
@click.pass_context
def beacon_delete(ctx, beacon_id) -> None:
    """Move a beacon to the recycle bin."""
    response = _request(ctx, "DELETE", f"/api/beacons/{beacon_id}")
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("restore")
@click.argument("beacon_id", type=int)
@click.pass_context
def beacon_restore(ctx, beacon_id) -> None:
    """Restore a beacon from the recycle bin."""
    response = _request(ctx, "POST", f"/api/beacons/{beacon_id}/restore")
    _emit(ctx, response.json(), _beacon_lines)


@beacon.command("join")
@click.argument("from_name")
@click.argument("to_name")
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.pass_context
def beacon_join(ctx, from_name, to_name, unit) -> None:
    """Bearing and distance between two named beacons."""
    response = _request(ctx, "GET", "/api/beacons/join",
                        params={"from": from_name, "to": to_name, "unit": unit})
    data = response.json()
    _emit(ctx, data, lambda d: [
        f"bearing   {d['bearing_dms']}  ({d['bearing_deg']:.6f} deg)",
        f"distance  {d['distance']:.3f} {d['unit']}",
    ])


@beacon.command("export")
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.option("--query", default=None, help="Limit to search matches.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def beacon_export(ctx, unit, query, out) -> None:
    """Export beacons as CSV."""
    params = {"unit": unit}
    if query:
        params["q"] = query
    response = _request(ctx, "GET", "/api/beacons/export.csv", params=params)
    if out:
        Path(out).write_text(response.text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(response.text, nl=False)


@beacon.command("import")
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def beacon_import(ctx, csv_file) -> None:
    """Import beacons from a CSV export."""
    text = Path(csv_file).read_text(encoding="utf-8")
    response = _request(ctx, "POST", "/api/beacons/import",
                        content=text.encode("utf-8"),
                        headers={"Content-Type": "text/csv"})
    data = response.json()
    _emit(ctx, data, lambda d: [f"imported {d['imported']} beacons"])


@beacon.command("geojson")
@click.option("--query", default=None)
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def beacon_geojson(ctx, query, out) -> None:
    """Beacons as a GeoJSON FeatureCollection (grid coordinates)."""
    params = {"q": query} if query else {}
    response = _request(ctx, "GET", "/api/beacons/geojson", params=params)
    text = json.dumps(response.json(), indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text)


# -- compute ----------------------------------------------------------------


@main.group()
def compute() -> None:
    """Survey computations (stateless)."""


def _parse_pair(value: str, what: str) -> list[float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise click.UsageError(f"{what} must be E,N: got {value!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise click.UsageError(f"{what} must be numeric E,N: got {value!r}")


@compute.command("area")
@click.option("--vertex", "vertices", multiple=True, required=True,
              help="Vertex as E,N; repeat in boundary order.")
@click.option("--unit", type=click.Choice(["m2", "ha", "acre", "ft2"]), default="m2",
              show_default=True)
@click.pass_context
def compute_area(ctx, vertices, unit) -> None:
    """Polygon area from boundary coordinates."""
    body = {"vertices": [_parse_pair(v, "--vertex") for v in vertices], "unit": unit}
    response = _request(ctx, "POST", "/api/compute/area", json=body)
    data = response.json()
    _emit(ctx, data, lambda d: [
        f"area  {d['area']:.4f} {d['unit']}  ({d['area_m2']:.4f} m2, "
        f"{d['vertex_count']} vertices)",
    ])


@compute.command("join")
@click.option("--from", "from_point", required=True, help="Start as E,N.")
@click.option("--to", "to_point", required=True, help="End as E,N.")
@click.option("--unit", type=click.Choice(["m", "ft"]), default="m", show_default=True)
@click.pass_context
def compute_join(ctx, from_point, to_point, unit) -> None:
    """Bearing and distance between two coordinated points."""
    body = {
        "from": _parse_pair(from_point, "--from"),
        "to": _parse_pair(to_point, "--to"),
        "unit": unit,
    }
    response = _request(ctx, "POST", "/api/compute/join", json=body)
    data = response.json()
    _emit(ctx, data, lambda d: [
        f"bearing   {d['bearing_dms']}  ({d['bearing_deg']:.6f} deg)",
        f"distance  {d['distance']:.3f} {d['unit']}",
    ])


@compute.command("detailing")
@click.option("--station", required=True, help="Station as E,N,Z.")
@click.option("--instrument-height", type=float, required=True)
@click.option("--reference-bearing", required=True,
              help="Bearing to the reference object (degrees or DMS).")
@click.option("--hcr-ref", required=True,
              help="Horizontal circle reading on the reference object.")
@click.option("--ray", "rays", multiple=True, required=True,
              help="Observation as NAME,HCR,VCR,SLOPE[,TARGET_HEIGHT].")
@click.pass_context
def compute_detailing(ctx, station, instrument_height, reference_bearing,
                      hcr_ref, rays) -> None:
    """Coordinate detail points observed by rays from a station."""
    parts = station.split(",")
    if len(parts) != 3:
        raise click.UsageError(f"--station must be E,N,Z: got {station!r}")
    try:
        e, n, z = (float(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"--station must be numeric E,N,Z: got {station!r}")
    observations = []
    for raw in rays:
        fields = raw.split(",")
        if len(fields) not in (4, 5):
            raise click.UsageError(
                f"--ray must be NAME,HCR,VCR,SLOPE[,TARGET_HEIGHT]: got {raw!r}"
            )
        try:
            obs = {
                "point_name": fields[0],
                "hcr": fields[1],
                "vcr_zenith": fields[2],
                "slope_distance": float(fields[3]),
            }
            if len(fields) == 5:
                obs["target_height"] = float(fields[4])
        except ValueError:
            raise click.UsageError(f"bad numbers in --ray {raw!r}")
        observations.append(obs)
    body = {
        "station": {"easting": e, "northing": n, "elevation": z},
        "instrument_height": instrument_height,
        "reference_bearing": reference_bearing,
        "hcr_to_reference": hcr_ref,
        "observations": observations,
    }
    response = _request(ctx, "POST", "/api/compute/detailing", json=body)
    data = response.json()

    def lines(d):
        rows = [
            {
                "point": p["point_name"],
                "easting": f"{p['easting']:.3f}",
                "northing": f"{p['northing']:.3f}",
                "elev": f"{p['elevation']:.3f}",
                "bearing": p["bearing_dms"],
                "h.dist": f"{p['horizontal_distance']:.3f}",
            }
            for p in d["points"]
        ]
        return _table(rows, [
            ("point", "point"), ("easting", "easting"), ("northing", "northing"),
            ("elev", "elev"), ("bearing", "bearing"), ("h.dist", "h.dist"),
        ])

    _emit(ctx, data, lines)


@compute.command("curve")
@click.option("--deflection", required=True, help="Deflection angle (degrees or DMS).")
@click.option("--radius", type=float, default=None)
@click.option("--length", "curve_length", type=float, default=None,
              help="Curve length; give this or --radius.")
@click.option("--ip-chainage", type=float, required=True)
@click.option("--chord", type=float, required=True, help="Standard chord.")
@click.pass_context
def compute_curve(ctx, deflection, radius, curve_length, ip_chainage, chord) -> None:
    """Horizontal circular curve setting-out report."""
    body = {
        "deflection": deflection,
        "radius": radius,
        "curve_length": curve_length,
        "ip_chainage": ip_chainage,
        "standard_chord": chord,
    }
    response = _request(ctx, "POST", "/api/compute/curve", json=body)
    data = response.json()

    def lines(d):
        out = [
            f"deflection        {d['deflection_dms']}",
            f"radius            {d['radius']:.3f} m",
            f"curve length      {d['curve_length']:.3f} m",
            f"tangent length    {d['tangent_length']:.3f} m",
            f"external distance {d['external_distance']:.3f} m",
            f"mid-ordinate      {d['mid_ordinate']:.3f} m",
            f"long chord        {d['long_chord']:.3f} m",
            f"chainage IP       {d['ip_chainage']:.3f}",
            f"chainage T1       {d['chainage_t1']:.3f}",
            f"chainage T2       {d['chainage_t2']:.3f}",
            f"initial sub-chord {d['initial_subchord']:.3f} m",
            f"final sub-chord   {d['final_subchord']:.3f} m",
            "",
        ]
        rows = [
            {
                "peg": p["name"],
                "chainage": f"{p['chainage']:.3f}",
                "chord": f"{p['chord']:.3f}",
                "tangential": p["tangential_angle_dms"],
                "cumulative": p["cumulative_angle_dms"],
            }
            for p in d["pegs"]
        ]
        out.extend(_table(rows, [
            ("peg", "peg"), ("chainage", "chainage"), ("chord", "chord"),
            ("tangential", "tangential"), ("cumulative", "cumulative"),
        ]))
        return out

    _emit(ctx, data, lines)


@compute.command("levels")
@click.option("--method", type=click.Choice(["rise_fall", "height_of_collimation"]),
              default="rise_fall", show_default=True)
@click.option("--start-rl", type=float, required=True)
@click.option("--closing-rl", type=float, default=None)
@click.option("--row", "rows", multiple=True, required=True,
              help="Book row as POINT,BS,IS,FS[,remarks]; leave unused readings empty.")
@click.pass_context
def compute_levels(ctx, method, start_rl, closing_rl, rows) -> None:
    """Reduce a level book and run the arithmetic checks."""
    parsed = []
    for raw in rows:
        fields = raw.split(",")
        if len(fields) not in (4, 5):
            raise click.UsageError(
                f"--row must be POINT,BS,IS,FS[,remarks]: got {raw!r}"
            )
        def reading(s: str, what: str):
            s = s.strip()
            if not s:
                return None
            try:
                return float(s)
            except ValueError:
                raise click.UsageError(f"bad {what} in --row {raw!r}")
        parsed.append({
            "point": fields[0],
            "backsight": reading(fields[1], "BS"),
            "intersight": reading(fields[2], "IS"),
            "foresight": reading(fields[3], "FS"),
            "remarks": fields[4] if len(fields) == 5 else "",
        })
    body = {"method": method, "start_rl": start_rl, "closing_rl": closing_rl,
            "rows": parsed}
    response = _request(ctx, "POST", "/api/compute/levels", json=body)
    data = response.json()

    def lines(d):
        rows_out = [
            {
                "point": r["point"],
                "BS": _num(r["backsight"]),
                "IS": _num(r["intersight"]),
                "FS": _num(r["foresight"]),
                "rise": _num(r["rise"]),
                "fall": _num(r["fall"]),
                "HPC": _num(r["height_of_collimation"]),
                "RL": _num(r["reduced_level"]),
                "remarks": r["remarks"],
            }
            for r in d["rows"]
        ]
        out = _table(rows_out, [
            ("point", "point"), ("BS", "BS"), ("IS", "IS"), ("FS", "FS"),
            ("rise", "rise"), ("fall", "fall"), ("HPC", "HPC"), ("RL", "RL"),
            ("remarks", "remarks"),
        ])
        out.append("")
        out.append(
            f"sum BS {d['sum_backsight']:.3f}  sum FS {d['sum_foresight']:.3f}  "
            f"sum rise {d['sum_rise']:.3f}  sum fall {d['sum_fall']:.3f}"
        )
        out.append(f"checks {'PASS' if d['checks_pass'] else 'FAIL'}")
        if d["misclose"] is not None:
            out.append(f"misclose {d['misclose']:+.6f} m")
        for f in d["failures"]:
            out.append(f"  ! {f}")
        return out

    _emit(ctx, data, lines)


# -- lend ---------------------------------------------------------------------


@main.group()
def lend() -> None:
    """Lending ledger."""


_LEND_COLS = [
    ("id", "lending_id"), ("date", "date"), ("person", "person_name"),
    ("dept", "person_department"), ("items", "total_instru"),
    ("returned", "is_returned"), ("deleted", "deleted"),
]


def _lend_lines(data) -> list[str]:
    rows = data if isinstance(data, list) else [data]
    out = _table(rows, _LEND_COLS)
    if isinstance(data, dict):
        for d in data.get("details", []):
            serials = f"  [{', '.join(d['serials'])}]" if d["serials"] else ""
            out.append(f"    {d['quantity']:>3} x {d['instrument_name']}{serials}")
    return out


@lend.command("new")
@click.option("--person", required=True, help="Borrower name.")
@click.option("--department", default="")
@click.option("--phone", default="")
@click.option("--remarks", default="")
@click.option("--item", "items", multiple=True, required=True,
              help="Line as NAME:QTY[:serial+serial...]; repeat per instrument.")
@click.pass_context
def lend_new(ctx, person, department, phone, remarks, items) -> None:
    """Record a lending."""
    parsed = []
    for raw in items:
        bits = raw.split(":")
        if len(bits) not in (2, 3):
            raise click.UsageError(
                f"--item must be NAME:QTY[:serial+serial...]: got {raw!r}"
            )
        try:
            quantity = int(bits[1])
        except ValueError:
            raise click.UsageError(f"bad quantity in --item {raw!r}")
        serials = [s for s in bits[2].split("+") if s] if len(bits) == 3 else []
        parsed.append({"instrument_name": bits[0], "quantity": quantity,
                       "serials": serials})
    body = {
        "person_name": person, "person_department": department,
        "person_phone": phone, "remarks": remarks, "items": parsed,
    }
    response = _request(ctx, "POST", "/api/lendings", json=body)
    _emit(ctx, response.json(), _lend_lines)


@lend.command("return")
@click.option("--id", "lending_id", type=int, required=True)
@click.pass_context
def lend_return(ctx, lending_id) -> None:
    """Return all instruments of a lending and print the note."""
    response = _request(ctx, "POST", f"/api/lendings/{lending_id}/return")
    data = response.json()
    _emit(ctx, data, lambda d: d["note_text"].splitlines())


@lend.command("list")
@click.option("--include-deleted", is_flag=True, default=False)
@click.option("--open-only", is_flag=True, default=False)
@click.pass_context
def lend_list(ctx, include_deleted, open_only) -> None:
    """List lendings, newest first."""
    response = _request(ctx, "GET", "/api/lendings",
                        params={"include_deleted": include_deleted,
                                "open_only": open_only})
    _emit(ctx, response.json(), _lend_lines)


@lend.command("search")
@click.argument("query")
@click.option("--include-deleted", is_flag=True, default=False)
@click.pass_context
def lend_search(ctx, query, include_deleted) -> None:
    """Search lendings by person, department, instrument or serial."""
    response = _request(ctx, "GET", "/api/lendings",
                        params={"q": query, "include_deleted": include_deleted})
    _emit(ctx, response.json(), _lend_lines)


@lend.command("show")
@click.argument("lending_id", type=int)
@click.option("--include-deleted", is_flag=True, default=False)
@click.pass_context
def lend_show(ctx, lending_id, include_deleted) -> None:
    """Show one lending with its detail lines."""
    response = _request(ctx, "GET", f"/api/lendings/{lending_id}",
                        params={"include_deleted": include_deleted})
    _emit(ctx, response.json(), _lend_lines)


@lend.command("delete")
@click.option("--id", "lending_id", type=int, required=True)
@click.pass_context
def lend_delete(ctx, lending_id) -> None:
    """Move a returned lending to the recycle bin."""
    response = _request(ctx, "DELETE", f"/api/lendings/{lending_id}")
    _emit(ctx, response.json(), _lend_lines)


@lend.command("restore")
@click.option("--id", "lending_id", type=int, required=True)
@click.pass_context
def lend_restore(ctx, lending_id) -> None:
    """Restore a lending from the recycle bin."""
    response = _request(ctx, "POST", f"/api/lendings/{lending_id}/restore")
    _emit(ctx, response.json(), _lend_lines)


@main.command("recycle")
@click.pass_context
def recycle(ctx) -> None:
    """Show the recycle bin."""
    response = _request(ctx, "GET", "/api/recycle-bin")
    _emit(ctx, response.json(), lambda rows: _table(rows, [
        ("kind", "kind"), ("id", "record_id"), ("label", "label"),
        ("deleted at", "deleted_at"),
    ]))


# -- stock ----------------------------------------------------------------------


@main.group()
def stock() -> None:
    """Instrument stock counts."""


_STOCK_COLS = [
    ("id", "instrument_id"), ("instrument", "instrument_name"), ("total", "total"),
    ("lent", "lent"), ("faulty", "faulty"), ("remaining", "remaining"),
]


@stock.command("list")
@click.pass_context
def stock_list(ctx) -> None:
    """List stock."""
    response = _request(ctx, "GET", "/api/instruments")
    _emit(ctx, response.json(), lambda rows: _table(rows, _STOCK_COLS))


@stock.command("upsert")
@click.option("--name", required=True)
@click.option("--total", type=int, required=True)
@click.option("--faulty", type=int, default=0, show_default=True)
@click.option("--description", default=None)
@click.pass_context
def stock_upsert(ctx, name, total, faulty, description) -> None:
    """Create an instrument type or adjust its counts."""
    body = {"instrument_name": name, "total": total, "faulty": faulty,
            "description": description}
    response = _request(ctx, "PUT", "/api/instruments", json=body)
    _emit(ctx, [response.json()], lambda rows: _table(rows, _STOCK_COLS))


# -- catalog ---------------------------------------------------------------------


@main.group()
def catalog() -> None:
    """Instrument catalog and job templates."""


_CATALOG_COLS = [
    ("instrument", "instrument_name"), ("room", "room"), ("shelf", "shelf"),
    ("description", "description"),
]


@catalog.command("list")
@click.pass_context
def catalog_list(ctx) -> None:
    """List catalog entries."""
    response = _request(ctx, "GET", "/api/catalog")
    _emit(ctx, response.json(), lambda rows: _table(rows, _CATALOG_COLS))


@catalog.command("search")
@click.argument("query")
@click.pass_context
def catalog_search(ctx, query) -> None:
    """Search the catalog by name, then description."""
    response = _request(ctx, "GET", "/api/catalog", params={"q": query})
    _emit(ctx, response.json(), lambda rows: _table(rows, _CATALOG_COLS))


@catalog.command("upsert")
@click.option("--name", required=True)
@click.option("--description", default=None)
@click.option("--room", default=None)
@click.option("--shelf", default=None)
@click.pass_context
def catalog_upsert(ctx, name, description, room, shelf) -> None:
    """Create or update a catalog entry."""
    body = {"instrument_name": name, "description": description,
            "room": room, "shelf": shelf}
    response = _request(ctx, "PUT", "/api/catalog", json=body)
    _emit(ctx, [response.json()], lambda rows: _table(rows, _CATALOG_COLS))


@catalog.command("import")
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def catalog_import(ctx, csv_file) -> None:
    """Import catalog entries from CSV."""
    text = Path(csv_file).read_text(encoding="utf-8")
    response = _request(ctx, "POST", "/api/catalog/import",
                        content=text.encode("utf-8"),
                        headers={"Content-Type": "text/csv"})
    data = response.json()
    _emit(ctx, data, lambda d: [f"imported {d['imported']} entries"])


@catalog.command("locate")
@click.argument("name")
@click.pass_context
def catalog_locate(ctx, name) -> None:
    """Where an instrument lives, with live availability."""
    response = _request(ctx, "GET", "/api/catalog/locate", params={"name": name})
    data = response.json()

    def lines(d):
        out = [
            f"{d['instrument_name']}: room {d['room']}"
            + (f", shelf {d['shelf']}" if d["shelf"] else ""),
        ]
        if d["description"]:
            out.append(d["description"])
        if d["stocked"]:
            out.append(f"remaining in store: {d['remaining']}")
        else:
            out.append("not currently stocked")
        return out

    _emit(ctx, data, lines)


@catalog.command("job")
@click.argument("job_type")
@click.pass_context
def catalog_job(ctx, job_type) -> None:
    """Instruments required for a job type, against live stock."""
    response = _request(ctx, "GET", f"/api/catalog/jobs/{job_type}")
    data = response.json()

    def lines(d):
        rows = [
            {
                "instrument": l["instrument_name"],
                "required": l["required"],
                "remaining": "unstocked" if l["remaining"] is None else l["remaining"],
                "ok": "yes" if l["covered"] else "NO",
            }
            for l in d["lines"]
        ]
        out = _table(rows, [
            ("instrument", "instrument"), ("required", "required"),
            ("remaining", "remaining"), ("ok", "ok"),
        ])
        out.append(f"job {d['job_type']!r}: "
                   + ("all covered" if d["all_covered"] else "SHORTFALL"))
        return out

    _emit(ctx, data, lines)


@catalog.command("jobs")
@click.pass_context
def catalog_jobs(ctx) -> None:
    """List job templates."""
    response = _request(ctx, "GET", "/api/catalog/jobs")
    data = response.json()

    def lines(templates):
        out = []
        for t in templates:
            req = ", ".join(f"{r['quantity']} x {r['instrument_name']}"
                            for r in t["required"])
            out.append(f"{t['job_type']}: {req}")
        return out or ["(none)"]

    _emit(ctx, data, lines)


@catalog.command("job-set")
@click.argument("job_type")
@click.option("--require", "requirements", multiple=True, required=True,
              help="Line as NAME:QTY; repeat per instrument.")
@click.pass_context
def catalog_job_set(ctx, job_type, requirements) -> None:
    """Define or replace a job template."""
    required = []
    for raw in requirements:
        name, sep, qty = raw.rpartition(":")
        if not sep or not name:
            raise click.UsageError(f"--require must be NAME:QTY: got {raw!r}")
        try:
            required.append({"instrument_name": name, "quantity": int(qty)})
        except ValueError:
            raise click.UsageError(f"bad quantity in --require {raw!r}")
    response = _request(ctx, "PUT", f"/api/catalog/jobs/{job_type}",
                        json={"required": required})
    data = response.json()
    req = ", ".join(f"{r['quantity']} x {r['instrument_name']}" for r in data["required"])
    _emit(ctx, data, lambda d: [f"{d['job_type']}: {req}"])


# -- stats -----------------------------------------------------------------------


@main.group()
def stats() -> None:
    """Ledger statistics."""


@stats.command("availability")
@click.pass_context
def stats_availability(ctx) -> None:
    """Current per-instrument availability."""
    response = _request(ctx, "GET", "/api/stats/availability")
    _emit(ctx, response.json(), lambda rows: _table(rows, [
        ("instrument", "instrument_name"), ("total", "total"), ("lent", "lent"),
        ("faulty", "faulty"), ("remaining", "remaining"),
    ]))


@stats.command("daily")
@click.option("--from", "from_day", required=True, help="Start date (ISO).")
@click.option("--to", "to_day", required=True, help="End date (ISO).")
@click.pass_context
def stats_daily(ctx, from_day, to_day) -> None:
    """Per-day lending counts over a date range."""
    response = _request(ctx, "GET", "/api/stats/daily",
                        params={"from": from_day, "to": to_day})
    _emit(ctx, response.json(), lambda rows: _table(rows, [
        ("date", "date"), ("lendings", "lendings"),
        ("instruments", "instruments"), ("returns", "returns"),
    ]))


@stats.command("conservation")
@click.pass_context
def stats_conservation(ctx) -> None:
    """Audit stock counts against open lendings."""
    response = _request(ctx, "GET", "/api/stats/conservation")
    data = response.json()

    def lines(d):
        rows = [
            {
                "instrument": r["instrument_name"],
                "recorded": r["lent_recorded"],
                "expected": r["lent_expected"],
                "remaining": r["remaining"],
                "ok": "yes" if r["ok"] else "NO",
            }
            for r in d["instruments"]
        ]
        out = _table(rows, [
            ("instrument", "instrument"), ("recorded", "recorded"),
            ("expected", "expected"), ("remaining", "remaining"), ("ok", "ok"),
        ])
        out.append("ledger " + ("consistent" if d["ok"] else "INCONSISTENT"))
        return out

    _emit(ctx, data, lines)


# -- media -----------------------------------------------------------------------


@main.group()
def media() -> None:
    """Managed media files."""


@media.command("put")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--name", default=None, help="Stored name (defaults to the file name).")
@click.pass_context
def media_put(ctx, file, name) -> None:
    """Upload a media file; prints the stored reference."""
    data = Path(file).read_bytes()
    filename = name or Path(file).name
    response = _request(ctx, "PUT", f"/api/media/{filename}", content=data)
    payload = response.json()
    _emit(ctx, payload, lambda d: [f"stored as {d['ref']} ({d['size']} bytes)"])


# -- backup ---------------------------------------------------------------------


@main.group()
def backup() -> None:
    """Backup archives."""


@backup.command("create")
@click.option("--out", default=None,
              help="Archive path or directory (server-side); defaults to "
                   "<data dir>/backups.")
@click.pass_context
def backup_create(ctx, out) -> None:
    """Create a verified backup archive."""
    response = _request(ctx, "POST", "/api/backup", json={"out_path": out})
    data = response.json()
    _emit(ctx, data, lambda d: [
        f"wrote {d['path']} ({d['size']} bytes)",
        f"sha256 {d['sha256']}",
    ])


@backup.command("upload")
@click.option("--archive", default=None,
              help="Existing archive (server-side path); omitted = create fresh.")
@click.option("--url", default=None, help="Override SURVSTORE_BACKUP_URL.")
@click.pass_context
def backup_upload(ctx, archive, url) -> None:
    """Upload a backup archive to the remote endpoint."""
    response = _request(ctx, "POST", "/api/backup/upload",
                        json={"archive_path": archive, "url": url})
    data = response.json()
    _emit(ctx, data, lambda d: [
        f"uploaded to {d['url']} (status {d['status']}, {d['size']} bytes)",
        f"sha256 {d['sha256']}",
    ])


@backup.command("restore")
@click.argument("archive", type=click.Path(exists=True, dir_okay=False))
@click.argument("target")
@click.option("--overwrite", is_flag=True, default=False,
              help="Replace a non-empty target directory.")
@click.pass_context
def backup_restore(ctx, archive, target, overwrite) -> None:
    """Rebuild a store directory from an archive (runs locally).

    Works without a running service so a store can be recovered while
    nothing holds its lock. Refuses a non-empty target unless told to
    overwrite.
    """
    from .backup import restore_backup
    from .errors import SurvStoreError

    try:
        restored = restore_backup(archive, target, overwrite=overwrite)
    except SurvStoreError as exc:
        _fail(exc.code, exc.message)
    click.echo(f"restored store into {restored}")


if __name__ == "__main__":
    main()
