//! Label-mask analytics: connected components, instance centroids and the
//! per-class centroid index built once before training.
//!
//! Semantic masks carry no instance ids, so "instances" are connected
//! components of equal-valued pixels (4-connectivity by default). The index
//! records one centroid per component (or optionally one per image/class
//! pair), keyed by class, and is the query structure for class-balanced
//! sampling.

use crate::error::{Error, Result};
use crate::mask::{LabelMask, IGNORE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

const INDEX_VERSION: u64 = 1;

/// Which neighbors of a pixel count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    /// N, S, E, W neighbors.
    Four,
    /// All eight neighbors.
    Eight,
}

/// Whether a mask's supervision came from a human or a teacher model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Real,
    Pseudo,
}

/// One centroid per connected component, or one per `(image, class)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentroidAggregation {
    PerComponent,
    PerImageClass,
}

/// A maximal set of 4- or 8-connected pixels sharing one class id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub class_id: u8,
    /// Pixels as `(row, col)`, sorted row-major.
    pub pixels: Vec<(u32, u32)>,
    pub area: usize,
    /// `(row_min, col_min, row_max, col_max)`, inclusive.
    pub bbox: (u32, u32, u32, u32),
}

/// Arithmetic-mean position of one instance, used as a crop anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub sample_id: String,
    #[serde(skip)]
    pub class_id: u8,
    pub row: f64,
    pub col: f64,
    pub area: u64,
}

/// Per-class catalog of instance centroids built before training.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidIndex {
    classes: BTreeMap<u8, Vec<Centroid>>,
    provenance: Provenance,
    num_samples: usize,
}

impl CentroidIndex {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    /// Class ids with at least one centroid, ascending.
    pub fn class_ids(&self) -> Vec<u8> {
        self.classes.keys().copied().collect()
    }

    pub fn centroids(&self, class_id: u8) -> Option<&[Centroid]> {
        self.classes.get(&class_id).map(|v| v.as_slice())
    }

    pub fn classes(&self) -> &BTreeMap<u8, Vec<Centroid>> {
        &self.classes
    }

    pub fn total_centroids(&self) -> usize {
        self.classes.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Distinct sample ids referenced by any centroid, ascending.
    pub fn sample_ids(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .classes
            .values()
            .flatten()
            .map(|c| c.sample_id.as_str())
            .collect();
        set.into_iter().map(String::from).collect()
    }
}

/// Splits every non-ignore pixel of `mask` into maximal same-class components.
///
/// Output is ordered by `(class_id, row_min, col_min)`. Pixel values at or
/// above `num_classes` (other than the ignore value) are a validation error
/// naming the offending pixel.
pub fn connected_components(
    mask: &LabelMask,
    connectivity: Connectivity,
    num_classes: usize,
) -> Result<Vec<Component>> {
    mask.validate(num_classes)?;
    let (h, w) = (mask.height(), mask.width());
    let n = h * w;
    let mut forest = DisjointSets::new(n);

    // First pass: union each pixel with its already-scanned same-class
    // neighbors (W and N, plus NW/NE for 8-connectivity).
    for r in 0..h {
        for c in 0..w {
            let v = mask.get(r, c);
            if v == IGNORE {
                continue;
            }
            let idx = r * w + c;
            if c > 0 && mask.get(r, c - 1) == v {
                forest.union(idx, idx - 1);
            }
            if r > 0 && mask.get(r - 1, c) == v {
                forest.union(idx, idx - w);
            }
            if connectivity == Connectivity::Eight && r > 0 {
                if c > 0 && mask.get(r - 1, c - 1) == v {
                    forest.union(idx, idx - w - 1);
                }
                if c + 1 < w && mask.get(r - 1, c + 1) == v {
                    forest.union(idx, idx - w + 1);
                }
            }
        }
    }

    // Second pass: group pixels by root.
    let mut by_root: BTreeMap<usize, Vec<(u32, u32)>> = BTreeMap::new();
    for r in 0..h {
        for c in 0..w {
            if mask.get(r, c) == IGNORE {
                continue;
            }
            let root = forest.find(r * w + c);
            by_root.entry(root).or_default().push((r as u32, c as u32));
        }
    }

    let mut components: Vec<Component> = by_root
        .into_values()
        .map(|pixels| {
            // row-major scan order already sorts the pixel list
            let class_id = mask.get(pixels[0].0 as usize, pixels[0].1 as usize);
            let row_min = pixels.iter().map(|p| p.0).min().unwrap();
            let row_max = pixels.iter().map(|p| p.0).max().unwrap();
            let col_min = pixels.iter().map(|p| p.1).min().unwrap();
            let col_max = pixels.iter().map(|p| p.1).max().unwrap();
            Component {
                class_id,
                area: pixels.len(),
                bbox: (row_min, col_min, row_max, col_max),
                pixels,
            }
        })
        .collect();
    components.sort_by_key(|comp| (comp.class_id, comp.bbox.0, comp.bbox.1));
    Ok(components)
}

/// Arithmetic mean of the component's pixel coordinates.
pub fn centroid_of(component: &Component) -> (f64, f64) {
    assert!(
        !component.pixels.is_empty(),
        "centroid of an empty component"
    );
    let mut row_sum = 0u64;
    let mut col_sum = 0u64;
    for &(r, c) in &component.pixels {
        row_sum += r as u64;
        col_sum += c as u64;
    }
    let n = component.pixels.len() as f64;
    (row_sum as f64 / n, col_sum as f64 / n)
}

/// Builds a [`CentroidIndex`] with 4-connectivity and per-component centroids.
pub fn build_centroid_index<'a, I>(
    dataset: I,
    num_classes: usize,
    provenance: Provenance,
    min_area: usize,
) -> Result<CentroidIndex>
where
    I: IntoIterator<Item = (&'a str, &'a LabelMask)>,
{
    build_centroid_index_with(
        dataset,
        num_classes,
        provenance,
        min_area,
        Connectivity::Four,
        CentroidAggregation::PerComponent,
    )
}

/// [`build_centroid_index`] with explicit connectivity and aggregation.
///
/// Masks are processed in parallel; the merged output is sorted by
/// `(class_id, sample_id, row, col)` so it is identical for any worker count.
pub fn build_centroid_index_with<'a, I>(
    dataset: I,
    num_classes: usize,
    provenance: Provenance,
    min_area: usize,
    connectivity: Connectivity,
    aggregation: CentroidAggregation,
) -> Result<CentroidIndex>
where
    I: IntoIterator<Item = (&'a str, &'a LabelMask)>,
{
    if min_area == 0 {
        return Err(Error::invalid("min_area must be at least 1"));
    }
    let items: Vec<(&str, &LabelMask)> = dataset.into_iter().collect();
    let mut seen = BTreeSet::new();
    for (id, _) in &items {
        if !seen.insert(*id) {
            return Err(Error::DuplicateSampleId((*id).to_string()));
        }
    }

    let per_mask: Vec<Result<Vec<Centroid>>> = items
        .par_iter()
        .map(|(id, mask)| mask_centroids(id, mask, num_classes, connectivity, aggregation, min_area))
        .collect();

    let mut classes: BTreeMap<u8, Vec<Centroid>> = BTreeMap::new();
    for res in per_mask {
        for c in res? {
            classes.entry(c.class_id).or_default().push(c);
        }
    }
    for list in classes.values_mut() {
        list.sort_by(|a, b| {
            a.sample_id
                .cmp(&b.sample_id)
                .then(a.row.total_cmp(&b.row))
                .then(a.col.total_cmp(&b.col))
        });
    }
    Ok(CentroidIndex {
        classes,
        provenance,
        num_samples: items.len(),
    })
}

fn mask_centroids(
    sample_id: &str,
    mask: &LabelMask,
    num_classes: usize,
    connectivity: Connectivity,
    aggregation: CentroidAggregation,
    min_area: usize,
) -> Result<Vec<Centroid>> {
    let components = connected_components(mask, connectivity, num_classes)?;
    let kept = components.into_iter().filter(|c| c.area >= min_area);
    let centroids = match aggregation {
        CentroidAggregation::PerComponent => kept
            .map(|comp| {
                let (row, col) = centroid_of(&comp);
                Centroid {
                    sample_id: sample_id.to_string(),
                    class_id: comp.class_id,
                    row,
                    col,
                    area: comp.area as u64,
                }
            })
            .collect(),
        CentroidAggregation::PerImageClass => {
            // Pool the surviving components of each class into one centroid:
            // the pixel mean of their union.
            let mut acc: BTreeMap<u8, (u64, u64, u64)> = BTreeMap::new();
            for comp in kept {
                let entry = acc.entry(comp.class_id).or_insert((0, 0, 0));
                for &(r, c) in &comp.pixels {
                    entry.0 += r as u64;
                    entry.1 += c as u64;
                }
                entry.2 += comp.area as u64;
            }
            acc.into_iter()
                .map(|(class_id, (rs, cs, area))| Centroid {
                    sample_id: sample_id.to_string(),
                    class_id,
                    row: rs as f64 / area as f64,
                    col: cs as f64 / area as f64,
                    area,
                })
                .collect()
        }
    };
    Ok(centroids)
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    version: u64,
    provenance: Provenance,
    num_samples: usize,
    classes: BTreeMap<String, Vec<Centroid>>,
}

/// Writes the index as a versioned JSON document.
pub fn save_index(index: &CentroidIndex, path: &Path) -> Result<()> {
    let file = IndexFile {
        version: INDEX_VERSION,
        provenance: index.provenance,
        num_samples: index.num_samples,
        classes: index
            .classes
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::Serde(e.to_string()))?;
    text.push('\n');
    crate::util::write_bytes(path, text.as_bytes())
}

/// Loads an index written by [`save_index`]; version mismatches are rejected
/// before any entries are interpreted.
pub fn load_index(path: &Path) -> Result<CentroidIndex> {
    let text = crate::util::read_to_string(path)?;
    let file: IndexFile =
        serde_json::from_str(&text).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))?;
    if file.version != INDEX_VERSION {
        return Err(Error::IndexVersion {
            found: file.version,
            expected: INDEX_VERSION,
        });
    }
    let mut classes = BTreeMap::new();
    for (key, mut list) in file.classes {
        let class_id: u8 = key
            .parse()
            .map_err(|_| Error::Serde(format!("bad class id key `{key}`")))?;
        for c in &mut list {
            c.class_id = class_id;
        }
        if list.is_empty() {
            return Err(Error::Serde(format!(
                "class {class_id} present with no centroids"
            )));
        }
        classes.insert(class_id, list);
    }
    Ok(CentroidIndex {
        classes,
        provenance: file.provenance,
        num_samples: file.num_samples,
    })
}

/// Union-find over pixel indices with path halving.
struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // smaller root wins, keeps labels stable under scan order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

#[cfg(test)]
pub mod oracle {
    //! Independent BFS flood-fill reference used by unit and acceptance tests.

    use crate::mask::{LabelMask, IGNORE};
    use std::collections::VecDeque;

    /// Flood-fills each class separately; returns every component's pixel set
    /// sorted row-major, with the overall list sorted for comparison.
    pub fn flood_fill_components(
        mask: &LabelMask,
        eight_connected: bool,
    ) -> Vec<(u8, Vec<(u32, u32)>)> {
        let (h, w) = (mask.height(), mask.width());
        let mut visited = vec![false; h * w];
        let mut out = Vec::new();
        for sr in 0..h {
            for sc in 0..w {
                let v = mask.get(sr, sc);
                if v == IGNORE || visited[sr * w + sc] {
                    continue;
                }
                let mut pixels = Vec::new();
                let mut queue = VecDeque::new();
                visited[sr * w + sc] = true;
                queue.push_back((sr, sc));
                while let Some((r, c)) = queue.pop_front() {
                    pixels.push((r as u32, c as u32));
                    let mut neighbors = vec![];
                    if r > 0 {
                        neighbors.push((r - 1, c));
                    }
                    if r + 1 < h {
                        neighbors.push((r + 1, c));
                    }
                    if c > 0 {
                        neighbors.push((r, c - 1));
                    }
                    if c + 1 < w {
                        neighbors.push((r, c + 1));
                    }
                    if eight_connected {
                        if r > 0 && c > 0 {
                            neighbors.push((r - 1, c - 1));
                        }
                        if r > 0 && c + 1 < w {
                            neighbors.push((r - 1, c + 1));
                        }
                        if r + 1 < h && c > 0 {
                            neighbors.push((r + 1, c - 1));
                        }
                        if r + 1 < h && c + 1 < w {
                            neighbors.push((r + 1, c + 1));
                        }
                    }
                    for (nr, nc) in neighbors {
                        if !visited[nr * w + nc] && mask.get(nr, nc) == v {
                            visited[nr * w + nc] = true;
                            queue.push_back((nr, nc));
                        }
                    }
                }
                pixels.sort_unstable();
                out.push((v, pixels));
            }
        }
        out.sort();
        out
    }

    /// Brute-force coordinate mean of a pixel set.
    pub fn mean_position(pixels: &[(u32, u32)]) -> (f64, f64) {
        let n = pixels.len() as f64;
        let rs: f64 = pixels.iter().map(|p| p.0 as f64).sum();
        let cs: f64 = pixels.iter().map(|p| p.1 as f64).sum();
        (rs / n, cs / n)
    }

    /// Deterministic random mask for oracle comparisons.
    pub fn random_mask(
        seed: u64,
        max_side: usize,
        num_classes: usize,
        ignore_prob: f64,
    ) -> LabelMask {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let h = rng.gen_range(1..=max_side);
        let w = rng.gen_range(1..=max_side);
        let data = (0..h * w)
            .map(|_| {
                if rng.gen_bool(ignore_prob) {
                    IGNORE
                } else {
                    rng.gen_range(0..num_classes as u8)
                }
            })
            .collect();
        LabelMask::new(h, w, data).unwrap()
    }
}
