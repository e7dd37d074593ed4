"""TU-Dortmund graph datasets: parsing, writing, features and fold splits.

The on-disk format is four newline-terminated text files per dataset::

    NAME_A.txt               one arc per line, "i, j" (1-based global vertex ids)
    NAME_graph_indicator.txt line v holds the graph id of vertex v (1-based)
    NAME_graph_labels.txt    line g holds the class of graph g
    NAME_node_labels.txt     line v holds the label of vertex v

Raw labels (``{-1, 1}``, ``{1..6}``, ...) are remapped to contiguous 0-based
indices; the sorted raw values are kept on the :class:`Dataset` so the files
can be written back unchanged.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, IngestionError


@dataclass(frozen=True)
class LabeledGraph:
    num_vertices: int
    edges: tuple  # sorted tuple of (i, j) pairs with i <= j, 0-based
    vertex_labels: tuple
    class_label: int

    def __post_init__(self):
        if len(self.vertex_labels) != self.num_vertices:
            raise FormatError(
                f"{len(self.vertex_labels)} vertex labels for {self.num_vertices} vertices"
            )
        for i, j in self.edges:
            if not (0 <= i < self.num_vertices and 0 <= j < self.num_vertices):
                raise FormatError(f"edge ({i}, {j}) out of range for {self.num_vertices} vertices")


@dataclass(frozen=True)
class Dataset:
    name: str
    graphs: tuple
    num_vertex_labels: int
    num_classes: int
    vertex_label_values: tuple = field(default=())
    class_label_values: tuple = field(default=())

    def __post_init__(self):
        for g in self.graphs:
            if any(not 0 <= lab < self.num_vertex_labels for lab in g.vertex_labels):
                raise FormatError("vertex label outside the label alphabet")
            if not 0 <= g.class_label < self.num_classes:
                raise FormatError("class label outside [0, num_classes)")

    def __len__(self):
        return len(self.graphs)

    def __getitem__(self, idx):
        return self.graphs[idx]

    @property
    def labels(self):
        return np.array([g.class_label for g in self.graphs], dtype=np.int64)

    def subset(self, indices):
        return [self.graphs[i] for i in indices]


def make_graph(num_vertices, edges, vertex_labels, class_label):
    """Build a :class:`LabeledGraph`, normalising the edge list.

    Edges may be given in either direction and may repeat; they are stored
    once each as ``(min, max)`` pairs in sorted order.
    """
    pairs = sorted({(min(i, j), max(i, j)) for i, j in edges})
    return LabeledGraph(
        num_vertices=int(num_vertices),
        edges=tuple((int(i), int(j)) for i, j in pairs),
        vertex_labels=tuple(int(v) for v in vertex_labels),
        class_label=int(class_label),
    )


def _read_ints(path, ncols):
    if not path.is_file():
        raise IngestionError(f"missing dataset file: {path}")
    rows = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != ncols:
                raise FormatError(f"{path.name}:{lineno}: expected {ncols} value(s), got {text!r}")
            try:
                rows.append((lineno, [int(float(p)) for p in parts]))
            except ValueError:
                raise FormatError(f"{path.name}:{lineno}: non-integer value in {text!r}") from None
    return rows


def parse_tu_dataset(directory, name):
    """Read dataset ``name`` from ``directory`` in TU-Dortmund format.

    Raises
    ------
    IngestionError
        If one of the four required files is missing.
    FormatError
        On dangling vertex ids, edges joining different graphs, or count
        mismatches. The message carries the offending file and line.
    """
    directory = Path(directory)
    files = {
        key: directory / f"{name}_{key}.txt"
        for key in ("A", "graph_indicator", "graph_labels", "node_labels")
    }
    for path in files.values():
        if not path.is_file():
            raise IngestionError(f"missing dataset file: {path}")

    indicator = [vals[0] for _, vals in _read_ints(files["graph_indicator"], 1)]
    node_raw = _read_ints(files["node_labels"], 1)
    graph_raw = [vals[0] for _, vals in _read_ints(files["graph_labels"], 1)]
    arcs = _read_ints(files["A"], 2)

    nv = len(indicator)
    if len(node_raw) != nv:
        raise FormatError(
            f"{files['node_labels'].name}: {len(node_raw)} labels for {nv} vertices"
        )
    ng = len(graph_raw)
    if any(not 1 <= gid <= ng for gid in indicator):
        raise FormatError(f"{files['graph_indicator'].name}: graph id outside 1..{ng}")
    if any(b < a for a, b in zip(indicator, indicator[1:])):
        raise FormatError(f"{files['graph_indicator'].name}: vertices are not grouped by graph")

    vertex_values = tuple(sorted({vals[0] for _, vals in node_raw}))
    class_values = tuple(sorted(set(graph_raw)))
    vmap = {v: k for k, v in enumerate(vertex_values)}
    cmap = {v: k for k, v in enumerate(class_values)}

    # first global vertex (0-based) of every graph
    offsets = [0] * (ng + 1)
    for gid in indicator:
        offsets[gid] += 1
    for g in range(1, ng + 1):
        offsets[g] += offsets[g - 1]

    edges = [[] for _ in range(ng)]
    for lineno, (a, b) in arcs:
        if not (1 <= a <= nv and 1 <= b <= nv):
            raise FormatError(f"{files['A'].name}:{lineno}: dangling vertex index in ({a}, {b})")
        ga, gb = indicator[a - 1], indicator[b - 1]
        if ga != gb:
            raise FormatError(f"{files['A'].name}:{lineno}: edge ({a}, {b}) joins graphs {ga} and {gb}")
        base = offsets[ga - 1]
        edges[ga - 1].append((a - 1 - base, b - 1 - base))

    graphs = []
    for g in range(ng):
        lo, hi = offsets[g], offsets[g + 1]
        labels = [vmap[vals[0]] for _, vals in node_raw[lo:hi]]
        graphs.append(make_graph(hi - lo, edges[g], labels, cmap[graph_raw[g]]))

    return Dataset(
        name=name,
        graphs=tuple(graphs),
        num_vertex_labels=len(vertex_values),
        num_classes=len(class_values),
        vertex_label_values=vertex_values,
        class_label_values=class_values,
    )


def locate_tu_dataset(name, root):
    """Return the directory under ``root`` holding ``name``'s files, or None.

    Looks in ``root/NAME``, ``root/NAME/NAME`` (the layout of the unpacked
    archives) and ``root`` itself.
    """
    root = Path(root)
    for directory in (root / name, root / name / name, root):
        if (directory / f"{name}_A.txt").is_file():
            return directory
    return None


def write_tu_dataset(dataset, directory):
    """Write ``dataset`` to ``directory`` in TU format (arcs listed both ways)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    vvals = dataset.vertex_label_values or tuple(range(dataset.num_vertex_labels))
    cvals = dataset.class_label_values or tuple(range(dataset.num_classes))
    arcs, indicator, node_labels, graph_labels = [], [], [], []
    base = 0
    for gid, g in enumerate(dataset.graphs, start=1):
        for i, j in g.edges:
            arcs.append(f"{base + i + 1}, {base + j + 1}")
            if i != j:
                arcs.append(f"{base + j + 1}, {base + i + 1}")
        indicator.extend([str(gid)] * g.num_vertices)
        node_labels.extend(str(vvals[lab]) for lab in g.vertex_labels)
        graph_labels.append(str(cvals[g.class_label]))
        base += g.num_vertices
    contents = {
        "A": arcs,
        "graph_indicator": indicator,
        "graph_labels": graph_labels,
        "node_labels": node_labels,
    }
    for key, lines in contents.items():
        (directory / f"{dataset.name}_{key}.txt").write_text("".join(s + "\n" for s in lines))


def one_hot_features(g, num_labels):
    """|V| x num_labels indicator matrix of the vertex labels."""
    labels = np.asarray(g.vertex_labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= num_labels):
        raise FormatError(f"vertex label outside [0, {num_labels})")
    out = np.zeros((g.num_vertices, num_labels), dtype=np.float64)
    out[np.arange(g.num_vertices), labels] = 1.0
    return out


def adjacency(g):
    """Dense symmetric 0/1 adjacency matrix. No self-loops are added."""
    a = np.zeros((g.num_vertices, g.num_vertices), dtype=np.float64)
    if g.edges:
        idx = np.asarray(g.edges, dtype=np.int64)
        a[idx[:, 0], idx[:, 1]] = 1.0
        a[idx[:, 1], idx[:, 0]] = 1.0
    return a


def kfold_split(n, k, seed, stratify=None):
    """Seeded k-fold partition of ``range(n)``.

    Returns a list of ``(train_indices, test_indices)`` pairs. Test folds are
    disjoint, differ in size by at most one, and together cover every index.
    Pass class labels as ``stratify`` to balance classes across folds.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"cannot split {n} items into {k} folds")
    rng = np.random.default_rng(seed)
    if stratify is None:
        folds = np.array_split(rng.permutation(n), k)
    else:
        labels = np.asarray(stratify)
        if labels.shape != (n,):
            raise ValueError("stratify must hold one label per item")
        # deal each class round-robin, continuing where the previous class stopped
        order = []
        for c in np.unique(labels):
            members = np.flatnonzero(labels == c)
            order.extend(rng.permutation(members).tolist())
        buckets = [[] for _ in range(k)]
        for pos, idx in enumerate(order):
            buckets[pos % k].append(idx)
        folds = [np.array(sorted(b), dtype=np.int64) for b in buckets]
    everything = np.arange(n)
    splits = []
    for test in folds:
        test = np.sort(np.asarray(test, dtype=np.int64))
        train = np.setdiff1d(everything, test)
        splits.append((train, test))
    return splits


def toy_dataset(num_graphs=10, num_classes=2, num_vertex_labels=3, vertices=(4, 9), noise=0.0, seed=0, name="TOY"):
    """Small random dataset whose classes are told apart by vertex labels.

    Every graph is a random tree plus a few chords. A vertex of a class-``c``
    graph carries label ``c % num_vertex_labels``; with probability ``noise``
    it gets a uniformly random label instead. ``noise=0`` gives a linearly
    separable set.
    """
    rng = np.random.default_rng(seed)
    graphs = []
    for i in range(num_graphs):
        c = i % num_classes
        nv = int(rng.integers(vertices[0], vertices[1] + 1))
        edges = [(int(rng.integers(0, v)), v) for v in range(1, nv)]
        for _ in range(nv // 3):
            a, b = rng.integers(0, nv, 2)
            if a != b:
                edges.append((int(a), int(b)))
        labels = np.full(nv, c % num_vertex_labels)
        flip = rng.random(nv) < noise
        labels[flip] = rng.integers(0, num_vertex_labels, int(flip.sum()))
        graphs.append(make_graph(nv, edges, labels, c))
    return Dataset(
        name=name,
        graphs=tuple(graphs),
        num_vertex_labels=num_vertex_labels,
        num_classes=num_classes,
        vertex_label_values=tuple(range(num_vertex_labels)),
        class_label_values=tuple(range(num_classes)),
    )
