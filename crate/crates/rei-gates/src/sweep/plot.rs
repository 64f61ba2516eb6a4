use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Heatmap,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(PlotKind::Line),
            "heatmap" => Ok(PlotKind::Heatmap),
            _ => Err(Error::Config(format!("unknown plot kind '{s}' (line, heatmap)"))),
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlotKind::Line => "line",
            PlotKind::Heatmap => "heatmap",
        })
    }
}

/// Axis columns and grids read from the `# axes =` metadata line. Files
/// without it use the first header column on a linear grid.
fn dataset_axes(text: &str) -> Vec<(String, bool)> {
    let from_meta = text.lines().find_map(|l| l.strip_prefix("# axes = ")).map(|spec| {
        spec.split(',')
            .filter(|s| !s.is_empty())
            .map(|a| {
                let (name, grid) = a.split_once(':').unwrap_or((a, "lin"));
                (name.to_string(), grid == "log")
            })
            .collect::<Vec<_>>()
    });
    match from_meta {
        Some(v) if !v.is_empty() => v,
        _ => {
            let header = text.lines().find(|l| !l.starts_with('#')).unwrap_or("");
            header.split(',').next().filter(|s| !s.is_empty()).map(|s| vec![(s.to_string(), false)]).unwrap_or_default()
        }
    }
}

fn header(text: &str) -> Vec<String> {
    text.lines()
        .find(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .unwrap_or_default()
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

fn py_bool(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Reference to `csv` usable from a script living in `script_dir`.
fn csv_reference(csv: &Path, script_dir: &Path) -> PathBuf {
    let abs = |p: &Path| p.canonicalize().unwrap_or_else(|_| p.to_path_buf());
    let (c, d) = (abs(csv), abs(script_dir));
    c.strip_prefix(&d).map(Path::to_path_buf).unwrap_or(c)
}

/// Matplotlib script for a sweep CSV. The script only reads the CSV; it
/// saves `<stem>_<kind>.png` next to itself.
pub fn emit_plotscript(csv: &Path, kind: PlotKind, script_dir: &Path) -> Result<String> {
    let text = std::fs::read_to_string(csv)?;
    let axes = dataset_axes(&text);
    let cols = header(&text);
    if axes.is_empty() {
        return Err(Error::Config(format!("{} has no header", csv.display())));
    }
    if kind == PlotKind::Heatmap && axes.len() < 2 {
        return Err(Error::Config("heatmap needs a two-axis dataset".into()));
    }
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    let contour = ["term_purcell_factor", "cooperativity"].into_iter().find(|c| cols.iter().any(|h| h == c));
    let rel = csv_reference(csv, script_dir);
    let mut s = String::new();
    s.push_str(&format!(
        "import csv\nimport math\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n\
HERE = os.path.dirname(os.path.abspath(__file__))\nCSV = os.path.join(HERE, {})\nOUT = os.path.join(HERE, {})\n\n\n",
        py_str(&rel.to_string_lossy()),
        py_str(&format!("{stem}_{kind}.png"))
    ));
    s.push_str(
        "def num(v):\n    try:\n        return float(v)\n    except ValueError:\n        return math.nan\n\n\n\
def load(path):\n    with open(path, newline=\"\") as f:\n        lines = [l for l in f if not l.startswith(\"#\")]\n    \
rows = list(csv.DictReader(lines))\n    return rows\n\n\nrows = load(CSV)\n",
    );
    s.push_str(&format!("X = {}\nX_LOG = {}\n", py_str(&axes[0].0), py_bool(axes[0].1)));
    match kind {
        PlotKind::Line => {
            let series = axes.get(1).map(|a| py_str(&a.0)).unwrap_or_else(|| "None".into());
            s.push_str(&format!("SERIES = {series}\n\n"));
            s.push_str(
                "groups = {}\nfor r in rows:\n    key = r[SERIES] if SERIES else \"\"\n    groups.setdefault(key, []).append(r)\n\n\
fig, (ax_f, ax_t) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))\n\
for key, rs in groups.items():\n    xs = [num(r[X]) for r in rs]\n    label = f\"{SERIES} = {num(key):.3g}\" if SERIES else None\n    \
ax_f.plot(xs, [num(r[\"fidelity\"]) for r in rs], marker=\".\", label=label)\n    \
ax_t.plot(xs, [num(r[\"gate_time\"]) for r in rs], marker=\".\", label=label)\n\
if not rows:\n    ax_f.plot([], [])\n    ax_t.plot([], [])\n\
ax_f.set_ylabel(\"fidelity\")\nax_t.set_ylabel(\"gate time (s)\")\nax_t.set_yscale(\"log\")\nax_t.set_xlabel(X)\n\
if X_LOG:\n    ax_t.set_xscale(\"log\")\nif SERIES and rows:\n    ax_f.legend(fontsize=\"small\")\n",
            );
        }
        PlotKind::Heatmap => {
            s.push_str(&format!(
                "Y = {}\nY_LOG = {}\nCONTOUR = {}\n\n",
                py_str(&axes[1].0),
                py_bool(axes[1].1),
                contour.map(py_str).unwrap_or_else(|| "None".into())
            ));
            s.push_str(
                "xs = sorted({num(r[X]) for r in rows})\nys = sorted({num(r[Y]) for r in rows})\n\
ix = {v: i for i, v in enumerate(xs)}\niy = {v: i for i, v in enumerate(ys)}\n\
Z = [[math.nan] * len(xs) for _ in ys]\nC = [[math.nan] * len(xs) for _ in ys]\n\
for r in rows:\n    i, j = ix[num(r[X])], iy[num(r[Y])]\n    Z[j][i] = num(r[\"fidelity\"])\n    if CONTOUR:\n        C[j][i] = num(r[CONTOUR])\n\n\
fig, ax = plt.subplots(figsize=(6, 5))\n\
if rows:\n    mesh = ax.pcolormesh(xs, ys, Z, shading=\"nearest\", vmin=0.0, vmax=1.0)\n    fig.colorbar(mesh, ax=ax, label=\"fidelity\")\n    \
finite = [v for row in C for v in row if v > 0]\n    if CONTOUR and finite and len(xs) > 1 and len(ys) > 1:\n        \
lo, hi = math.floor(math.log10(min(finite))), math.ceil(math.log10(max(finite)))\n        \
levels = [10.0 ** k for k in range(lo, hi + 1)]\n        \
cs = ax.contour(xs, ys, C, levels=levels, colors=\"white\", linestyles=\"dashed\", linewidths=0.8)\n        \
ax.clabel(cs, fmt=\"%.0e\", fontsize=\"small\")\n\
ax.set_xlabel(X)\nax.set_ylabel(Y)\nif X_LOG:\n    ax.set_xscale(\"log\")\nif Y_LOG:\n    ax.set_yscale(\"log\")\n",
            );
        }
    }
    s.push_str("fig.tight_layout()\nfig.savefig(OUT, dpi=150)\n");
    Ok(s)
}
