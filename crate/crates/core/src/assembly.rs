//! Multi-segment snake-robot assemblies and their planar centerlines.
//!
//! Each segment is a bending FREE inflated to an operating length. Its
//! strain-limiting fibers split it into sub-arcs: a sub-arc bends left (+1)
//! or right (−1) with the curvature of the inflated FREE, or stays straight
//! (0) where no limiting fiber is attached. Sub-arcs and segments are joined
//! with position and tangent continuity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centerline::{Centerline, Point, Units};
use crate::error::{Error, Result};
use crate::free_model::FreeGeometry;
use crate::roots::Bisection;

/// Fiber angle for straight heads and body curves.
pub const BODY_FIBER_ANGLE_DEG: f64 = 67.5;
/// Fiber angle for kinks and tails.
pub const KINK_FIBER_ANGLE_DEG: f64 = 89.0;

const FRACTION_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum BendSign {
    Left,
    Straight,
    Right,
}

impl BendSign {
    pub fn value(self) -> f64 {
        match self {
            BendSign::Left => 1.0,
            BendSign::Straight => 0.0,
            BendSign::Right => -1.0,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            BendSign::Left => BendSign::Right,
            BendSign::Straight => BendSign::Straight,
            BendSign::Right => BendSign::Left,
        }
    }
}

impl TryFrom<i8> for BendSign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(BendSign::Left),
            0 => Ok(BendSign::Straight),
            -1 => Ok(BendSign::Right),
            other => Err(format!("bend sign must be -1, 0 or 1, got {other}")),
        }
    }
}

impl From<BendSign> for i8 {
    fn from(s: BendSign) -> i8 {
        match s {
            BendSign::Left => 1,
            BendSign::Straight => 0,
            BendSign::Right => -1,
        }
    }
}

/// One constant-curvature portion of a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubArc {
    pub sign: BendSign,
    /// Share of the segment's length, in (0, 1].
    pub fraction: f64,
}

impl SubArc {
    pub fn new(sign: BendSign, fraction: f64) -> Self {
        Self { sign, fraction }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSpec {
    label: String,
    geom: FreeGeometry,
    inflation: f64,
    pattern: Vec<SubArc>,
}

impl SegmentSpec {
    pub fn new(
        label: impl Into<String>,
        geom: FreeGeometry,
        inflation: f64,
        pattern: Vec<SubArc>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&inflation) {
            return Err(Error::Domain {
                quantity: "lambda",
                value: inflation,
                bound: "inflation fraction must lie in [0, 1]".into(),
            });
        }
        if pattern.is_empty() {
            return Err(Error::InvalidInput("sign pattern must not be empty".into()));
        }
        if let Some(bad) = pattern.iter().find(|a| !(a.fraction > 0.0 && a.fraction.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "sub-arc fractions must be strictly positive, got {}",
                bad.fraction
            )));
        }
        let sum: f64 = pattern.iter().map(|a| a.fraction).sum();
        if (sum - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "sub-arc fractions must sum to 1, got {sum}"
            )));
        }
        Ok(Self {
            label: label.into(),
            geom,
            inflation,
            pattern,
        })
    }

    /// A single sub-arc covering the whole segment.
    pub fn uniform(label: impl Into<String>, geom: FreeGeometry, inflation: f64, sign: BendSign) -> Result<Self> {
        Self::new(label, geom, inflation, vec![SubArc::new(sign, 1.0)])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn geometry(&self) -> &FreeGeometry {
        &self.geom
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    pub fn pattern(&self) -> &[SubArc] {
        &self.pattern
    }

    pub fn is_straight(&self) -> bool {
        self.pattern.iter().all(|a| a.sign == BendSign::Straight)
    }

    /// `L_op = L0 + λ (L_max − L0)`.
    pub fn operating_length(&self) -> f64 {
        self.geom
            .length_at_inflation(self.inflation)
            .expect("inflation validated at construction")
    }

    /// Unsigned curvature of the bent sub-arcs at the operating length.
    pub fn curvature(&self) -> f64 {
        self.geom
            .curvature_at_length(self.operating_length())
            .expect("operating length lies in [L0, L_max]")
    }

    pub fn mirrored(&self) -> Self {
        Self {
            pattern: self
                .pattern
                .iter()
                .map(|a| SubArc::new(a.sign.mirrored(), a.fraction))
                .collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Genus {
    Atractus,
    Micrurus,
    Oxyrhopus,
    Custom(String),
}

impl Genus {
    pub const TEMPLATED: [Genus; 3] = [Genus::Atractus, Genus::Micrurus, Genus::Oxyrhopus];

    pub fn name(&self) -> &str {
        match self {
            Genus::Atractus => "Atractus",
            Genus::Micrurus => "Micrurus",
            Genus::Oxyrhopus => "Oxyrhopus",
            Genus::Custom(s) => s,
        }
    }
}

impl fmt::Display for Genus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Genus {
    type Err = std::convert::Infallible;

    /// Known genera match case-insensitively; anything else is custom.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "atractus" => Genus::Atractus,
            "micrurus" => Genus::Micrurus,
            "oxyrhopus" => Genus::Oxyrhopus,
            _ => Genus::Custom(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Head,
    Midsection,
    Tail,
}

/// An ordered head-to-tail chain of bending segments.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySpec {
    genus: Genus,
    segments: Vec<SegmentSpec>,
}

impl AssemblySpec {
    pub fn new(genus: Genus, segments: Vec<SegmentSpec>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("an assembly needs at least one segment".into()));
        }
        Ok(Self { genus, segments })
    }

    pub fn genus(&self) -> &Genus {
        &self.genus
    }

    pub fn segments(&self) -> &[SegmentSpec] {
        &self.segments
    }

    /// First segment is the head, last the tail, anything between midsection.
    pub fn role(&self, index: usize) -> Role {
        if index == 0 {
            Role::Head
        } else if index + 1 == self.segments.len() {
            Role::Tail
        } else {
            Role::Midsection
        }
    }

    pub fn total_operating_length(&self) -> f64 {
        self.segments.iter().map(SegmentSpec::operating_length).sum()
    }

    pub fn mirrored(&self) -> Self {
        Self {
            genus: self.genus.clone(),
            segments: self.segments.iter().map(SegmentSpec::mirrored).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MidShape {
    #[default]
    U,
    S,
}

/// Free parameters of the genus templates.
///
/// Fabricated segment dimensions and inflated lengths are not known, so the
/// bent segments are inflated just far enough to sweep the listed angles.
/// Straight segments take the inflation of the curved segment sharing their
/// fiber angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemplateParams {
    /// Relaxed length of the whole robot, meters.
    pub total_length: f64,
    pub relaxed_radius: f64,
    /// Relaxed length shares of head, midsection and tail.
    pub shares: [f64; 3],
    /// Share of the head occupied by the kink.
    pub kink_fraction: f64,
    pub kink_sweep: f64,
    /// Total bend angle of a midsection curve (split evenly for an S).
    pub midsection_sweep: f64,
    pub coil_sweep: f64,
    pub atractus_midsection: MidShape,
}

impl Default for TemplateParams {
    fn default() -> Self {
        Self {
            total_length: 0.40,
            relaxed_radius: 0.00475,
            shares: [0.25, 0.50, 0.25],
            kink_fraction: 0.3,
            kink_sweep: PI,
            midsection_sweep: PI,
            coil_sweep: 1.5 * PI,
            atractus_midsection: MidShape::U,
        }
    }
}

/// Inflation fraction at which the bent `fraction` of a segment sweeps
/// `sweep` radians.
pub fn inflation_for_sweep(geom: &FreeGeometry, fraction: f64, sweep: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("bent fraction must lie in (0, 1], got {fraction}")));
    }
    let l0 = geom.relaxed_length();
    let l_max = geom.max_length();
    let sweep_at = |l: f64| fraction * l * geom.curvature_at_length(l).unwrap_or(f64::NAN);
    let attainable = sweep_at(l_max);
    if !(sweep >= 0.0 && sweep <= attainable) {
        return Err(Error::Domain {
            quantity: "sweep",
            value: sweep,
            bound: format!("attainable bend angle is [0, {attainable}] rad"),
        });
    }
    let solver = Bisection {
        x_tol: 1e-14 * l_max,
        f_tol: 1e-12 * sweep.max(1e-300),
        max_iter: 200,
    };
    let l = solver.solve_increasing(|l| sweep_at(l) - sweep, l0, l_max)?;
    Ok(((l - l0) / (l_max - l0)).clamp(0.0, 1.0))
}

/// Template assembly for a genus tag, with default parameters.
pub fn genus_template(tag: &str) -> Result<AssemblySpec> {
    let genus: Genus = tag.parse().expect("infallible");
    genus_template_with(&genus, &TemplateParams::default())
}

pub fn genus_template_with(genus: &Genus, params: &TemplateParams) -> Result<AssemblySpec> {
    let [head_share, mid_share, tail_share] = params.shares;
    let len = |share: f64| share * params.total_length;
    let r0 = params.relaxed_radius;
    let body = |l0| FreeGeometry::from_degrees(l0, r0, BODY_FIBER_ANGLE_DEG);
    let kink = |l0| FreeGeometry::from_degrees(l0, r0, KINK_FIBER_ANGLE_DEG);

    let mid_geom = body(len(mid_share))?;
    let mid_lambda = inflation_for_sweep(&mid_geom, 1.0, params.midsection_sweep)?;
    let tail_geom = kink(len(tail_share))?;
    let tail_lambda = inflation_for_sweep(&tail_geom, 1.0, params.coil_sweep)?;

    let kinked_head = || -> Result<SegmentSpec> {
        let geom = kink(len(head_share))?;
        let f = params.kink_fraction;
        let lambda = inflation_for_sweep(&geom, f, params.kink_sweep)?;
        let rest = 0.5 * (1.0 - f);
        let pattern = if rest > 0.0 {
            vec![
                SubArc::new(BendSign::Straight, rest),
                SubArc::new(BendSign::Left, f),
                SubArc::new(BendSign::Straight, rest),
            ]
        } else {
            vec![SubArc::new(BendSign::Left, 1.0)]
        };
        SegmentSpec::new("head-kink", geom, lambda, pattern)
    };
    let straight_head = || SegmentSpec::uniform("head-straight", body(len(head_share))?, mid_lambda, BendSign::Straight);
    let midsection = |shape: MidShape| match shape {
        MidShape::U => SegmentSpec::uniform("mid-u-curve", mid_geom, mid_lambda, BendSign::Left),
        MidShape::S => SegmentSpec::new(
            "mid-s-curve",
            mid_geom,
            mid_lambda,
            vec![SubArc::new(BendSign::Left, 0.5), SubArc::new(BendSign::Right, 0.5)],
        ),
    };
    let coiled_tail = || SegmentSpec::uniform("tail-coil", tail_geom, tail_lambda, BendSign::Left);
    let straight_tail = || SegmentSpec::uniform("tail-straight", tail_geom, tail_lambda, BendSign::Straight);

    let segments = match genus {
        Genus::Atractus => vec![straight_head()?, midsection(params.atractus_midsection)?, coiled_tail()?],
        Genus::Micrurus => vec![kinked_head()?, midsection(MidShape::S)?, coiled_tail()?],
        Genus::Oxyrhopus => vec![kinked_head()?, midsection(MidShape::S)?, straight_tail()?],
        Genus::Custom(given) => {
            return Err(Error::UnknownGenus {
                given: given.clone(),
                valid: Genus::TEMPLATED.iter().map(Genus::name).collect::<Vec<_>>().join(", "),
            })
        }
    };
    AssemblySpec::new(genus.clone(), segments)
}

/// Constant-curvature piece of a planar curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPiece {
    pub start: Point,
    pub heading: f64,
    /// Signed; positive turns counter-clockwise.
    pub curvature: f64,
    pub length: f64,
}

impl ArcPiece {
    pub fn point_at(&self, s: f64) -> Point {
        let turn = self.curvature * s;
        let chord = if self.curvature == 0.0 {
            s
        } else {
            2.0 * (0.5 * turn).sin() / self.curvature
        };
        let dir = self.heading + 0.5 * turn;
        Point::new(self.start.x + chord * dir.cos(), self.start.y + chord * dir.sin())
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        self.heading + self.curvature * s
    }

    pub fn end(&self) -> (Point, f64) {
        (self.point_at(self.length), self.heading_at(self.length))
    }
}

/// Piecewise-constant-curvature rendering of an assembly, starting at the
/// origin heading along +x.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcChain {
    /// Pieces of each segment, head first.
    segments: Vec<Vec<ArcPiece>>,
}

impl ArcChain {
    pub fn from_spec(spec: &AssemblySpec) -> Self {
        let mut position = Point::new(0.0, 0.0);
        let mut heading = 0.0;
        let segments = spec
            .segments()
            .iter()
            .map(|seg| {
                let l_op = seg.operating_length();
                let k = seg.curvature();
                seg.pattern()
                    .iter()
                    .map(|arc| {
                        let piece = ArcPiece {
                            start: position,
                            heading,
                            curvature: arc.sign.value() * k,
                            length: arc.fraction * l_op,
                        };
                        (position, heading) = piece.end();
                        piece
                    })
                    .collect()
            })
            .collect();
        Self { segments }
    }

    pub fn segment_pieces(&self) -> &[Vec<ArcPiece>] {
        &self.segments
    }

    pub fn segment_length(&self, index: usize) -> f64 {
        self.segments[index].iter().map(|p| p.length).sum()
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segments.len()).map(|i| self.segment_length(i)).sum()
    }

    /// Point at arc length `s` measured from the start of segment `index`.
    pub fn segment_point(&self, index: usize, s: f64) -> Point {
        let pieces = &self.segments[index];
        let mut offset = 0.0;
        for (i, piece) in pieces.iter().enumerate() {
            if s <= offset + piece.length || i + 1 == pieces.len() {
                return piece.point_at((s - offset).clamp(0.0, piece.length));
            }
            offset += piece.length;
        }
        unreachable!("segments are never empty")
    }

    pub fn end_pose(&self) -> (Point, f64) {
        self.segments
            .last()
            .and_then(|s| s.last())
            .map(ArcPiece::end)
            .expect("segments are never empty")
    }
}

/// Samples the assembled robot's centerline with `samples_per_segment`
/// points per segment at uniform arc length. Joints are shared, so the
/// result has `segments · (samples − 1) + 1` points.
pub fn render_centerline(spec: &AssemblySpec, samples_per_segment: usize) -> Result<Centerline> {
    if samples_per_segment < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 samples per segment, got {samples_per_segment}"
        )));
    }
    let chain = ArcChain::from_spec(spec);
    let intervals = samples_per_segment - 1;
    let mut points = Vec::with_capacity(spec.segments().len() * intervals + 1);
    points.push(Point::new(0.0, 0.0));
    for (index, pieces) in chain.segment_pieces().iter().enumerate() {
        let length = chain.segment_length(index);
        for k in 1..intervals {
            points.push(chain.segment_point(index, length * k as f64 / intervals as f64));
        }
        points.push(pieces.last().expect("non-empty").end().0);
    }
    Centerline::new(points, Units::Meters)
}

/// JSON document form of an [`AssemblySpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblyDocument {
    pub genus: String,
    pub segments: Vec<SegmentDocument>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    pub label: String,
    pub L0_m: f64,
    pub R0_m: f64,
    pub alpha0_deg: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub sign_pattern: Vec<SubArcDocument>,
}

fn default_lambda() -> f64 {
    1.0
}

/// A sign-pattern entry: either `{"sign": 1, "fraction": 0.3}` or a bare
/// sign. Bare entries split whatever length the weighted ones leave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubArcDocument {
    Weighted { sign: BendSign, fraction: f64 },
    Bare(BendSign),
}

impl From<&AssemblySpec> for AssemblyDocument {
    fn from(spec: &AssemblySpec) -> Self {
        AssemblyDocument {
            genus: spec.genus().name().to_string(),
            segments: spec
                .segments()
                .iter()
                .map(|seg| SegmentDocument {
                    label: seg.label().to_string(),
                    L0_m: seg.geometry().relaxed_length(),
                    R0_m: seg.geometry().relaxed_radius(),
                    alpha0_deg: seg.geometry().fiber_angle().to_degrees(),
                    lambda: seg.inflation(),
                    sign_pattern: seg
                        .pattern()
                        .iter()
                        .map(|a| SubArcDocument::Weighted {
                            sign: a.sign,
                            fraction: a.fraction,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&AssemblyDocument> for AssemblySpec {
    type Error = Error;

    fn try_from(doc: &AssemblyDocument) -> Result<Self> {
        let at = |i: usize, e: Error| Error::InvalidInput(format!("segments[{i}]: {e}"));
        let segments = doc
            .segments
            .iter()
            .enumerate()
            .map(|(i, seg)| {
                let geom = FreeGeometry::from_degrees(seg.L0_m, seg.R0_m, seg.alpha0_deg).map_err(|e| at(i, e))?;
                let pattern = expand_pattern(&seg.sign_pattern).map_err(|e| at(i, e))?;
                SegmentSpec::new(seg.label.clone(), geom, seg.lambda, pattern).map_err(|e| at(i, e))
            })
            .collect::<Result<Vec<_>>>()?;
        AssemblySpec::new(doc.genus.parse().expect("infallible"), segments)
    }
}

fn expand_pattern(entries: &[SubArcDocument]) -> Result<Vec<SubArc>> {
    let weighted: f64 = entries
        .iter()
        .filter_map(|e| match e {
            SubArcDocument::Weighted { fraction, .. } => Some(*fraction),
            SubArcDocument::Bare(_) => None,
        })
        .sum();
    let bare = entries.iter().filter(|e| matches!(e, SubArcDocument::Bare(_))).count();
    let share = if bare > 0 { (1.0 - weighted) / bare as f64 } else { 0.0 };
    if bare > 0 && !(share > 0.0) {
        return Err(Error::InvalidInput(format!(
            "weighted sub-arcs already cover {weighted} of the segment; nothing left for {bare} bare entries"
        )));
    }
    Ok(entries
        .iter()
        .map(|e| match *e {
            SubArcDocument::Weighted { sign, fraction } => SubArc::new(sign, fraction),
            SubArcDocument::Bare(sign) => SubArc::new(sign, share),
        })
        .collect())
}
