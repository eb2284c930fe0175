//! Sparse design matrices with named, grouped columns.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::court::CourtZone;
use crate::error::{Error, Result};
use crate::types::{Position, PotentialAssist, TeamGameRatio, TeamId};

/// Column group names shared by designs, fits and reports.
pub mod groups {
    pub const INTERCEPT: &str = "intercept";
    pub const HOME: &str = "home";
    pub const TEAM: &str = "team";
    pub const OPPONENT: &str = "opponent";
    pub const SK_GENEROSITY: &str = "sk_generosity";
    pub const SK_BIAS: &str = "sk_bias";
    pub const PASSER: &str = "passer";
    pub const POSITION: &str = "position";
    pub const C1: &str = "c1_possession_time";
    pub const C2: &str = "c2_dribbles";
    pub const C3: &str = "c3_travel_distance";
    pub const C4: &str = "c4_pass_distance";
    pub const C5: &str = "c5_passer_defender_dist";
    pub const C6: &str = "c6_shooter_defender_dist";
    pub const PASSER_ZONE: &str = "passer_zone";
    pub const SHOOTER_ZONE: &str = "shooter_zone";
    pub const ZONE_PAIR: &str = "zone_pair";

    pub const CONTINUOUS: [&str; 6] = [C1, C2, C3, C4, C5, C6];
    /// Groups carrying spatio-temporal context.
    pub const CONTEXT: [&str; 9] = [C1, C2, C3, C4, C5, C6, PASSER_ZONE, SHOOTER_ZONE, ZONE_PAIR];
    /// Groups removed when adjusting assist totals.
    pub const NON_CONTEXTUAL: [&str; 7] =
        [HOME, TEAM, OPPONENT, SK_GENEROSITY, SK_BIAS, PASSER, POSITION];
}

/// Level name of a zone pair, `"<passer zone>><shooter zone>"`.
pub fn zone_pair_name(passer: CourtZone, shooter: CourtZone) -> &'static str {
    const NAMES: [&str; 36] = [
        "Dunk>Dunk", "Dunk>Paint", "Dunk>Long2", "Dunk>Arc3", "Dunk>Corner3", "Dunk>Heave",
        "Paint>Dunk", "Paint>Paint", "Paint>Long2", "Paint>Arc3", "Paint>Corner3", "Paint>Heave",
        "Long2>Dunk", "Long2>Paint", "Long2>Long2", "Long2>Arc3", "Long2>Corner3", "Long2>Heave",
        "Arc3>Dunk", "Arc3>Paint", "Arc3>Long2", "Arc3>Arc3", "Arc3>Corner3", "Arc3>Heave",
        "Corner3>Dunk", "Corner3>Paint", "Corner3>Long2", "Corner3>Arc3", "Corner3>Corner3", "Corner3>Heave",
        "Heave>Dunk", "Heave>Paint", "Heave>Long2", "Heave>Arc3", "Heave>Corner3", "Heave>Heave",
    ];
    NAMES[passer.index() * 6 + shooter.index()]
}

/// One nonzero entry of a design row before column lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<'a> {
    pub group: &'static str,
    pub level: &'a str,
    pub value: f64,
}

impl<'a> Term<'a> {
    fn new(group: &'static str, level: &'a str, value: f64) -> Self {
        Self { group, level, value }
    }
}

/// Nonzero terms of the contextual model for one potential assist, on the
/// original covariate scale.
pub fn contextual_terms(pa: &PotentialAssist) -> Vec<Term<'_>> {
    use groups::*;
    let mut t = Vec::with_capacity(18);
    t.push(Term::new(INTERCEPT, INTERCEPT, 1.0));
    if pa.is_home {
        t.push(Term::new(HOME, HOME, 1.0));
    }
    t.push(Term::new(TEAM, pa.team.as_str(), 1.0));
    t.push(Term::new(OPPONENT, pa.opponent.as_str(), 1.0));
    t.push(Term::new(SK_GENEROSITY, pa.scorekeeper.as_str(), 1.0));
    if pa.is_home {
        t.push(Term::new(SK_BIAS, pa.scorekeeper.as_str(), 1.0));
    }
    t.push(Term::new(PASSER, pa.passer.as_str(), 1.0));
    t.push(Term::new(POSITION, pa.passer_position.code(), 1.0));
    for (g, v) in CONTINUOUS.iter().zip(pa.continuous()) {
        t.push(Term::new(g, g, v));
    }
    t.push(Term::new(PASSER_ZONE, pa.c7_passer_zone.name(), 1.0));
    t.push(Term::new(SHOOTER_ZONE, pa.c8_shooter_zone.name(), 1.0));
    t.push(Term::new(ZONE_PAIR, zone_pair_name(pa.c7_passer_zone, pa.c8_shooter_zone), 1.0));
    t
}

/// Nonzero terms of the team-level ratio model for one observation.
pub fn team_terms(obs: &TeamGameRatio) -> Vec<Term<'_>> {
    use groups::*;
    let mut t = Vec::with_capacity(6);
    t.push(Term::new(INTERCEPT, INTERCEPT, 1.0));
    if obs.is_home {
        t.push(Term::new(HOME, HOME, 1.0));
    }
    t.push(Term::new(TEAM, obs.team.as_str(), 1.0));
    t.push(Term::new(OPPONENT, obs.opponent.as_str(), 1.0));
    t.push(Term::new(SK_GENEROSITY, obs.scorekeeper.as_str(), 1.0));
    if obs.is_home {
        t.push(Term::new(SK_BIAS, obs.scorekeeper.as_str(), 1.0));
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpan {
    pub name: String,
    pub start: usize,
    pub levels: Vec<String>,
    pub penalized: bool,
}

impl GroupSpan {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.levels.len()
    }
}

/// Centering and scaling applied to one continuous column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub column: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Row-compressed design matrix whose columns are partitioned into named groups.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    groups: Vec<GroupSpan>,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    scales: Vec<ColumnScale>,
}

/// Builds a [`DesignMatrix`] row by row from named terms.
pub struct DesignBuilder {
    groups: Vec<GroupSpan>,
    lookup: HashMap<&'static str, (usize, HashMap<String, usize>)>,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl DesignBuilder {
    pub fn new() -> Self {
        Self {
            groups: Vec::new(),
            lookup: HashMap::new(),
            n_cols: 0,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn group<I, S>(mut self, name: &'static str, levels: I, penalized: bool) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        let map = levels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        self.lookup.insert(name, (self.groups.len(), map));
        self.groups.push(GroupSpan {
            name: name.to_string(),
            start: self.n_cols,
            levels,
            penalized,
        });
        self.n_cols = self.groups.last().map_or(0, |g| g.start + g.len());
        self
    }

    pub fn push_row(&mut self, terms: &[Term<'_>]) -> Result<()> {
        let start = self.indices.len();
        for term in terms {
            if term.value == 0.0 {
                continue;
            }
            let Some((gi, levels)) = self.lookup.get(term.group) else {
                // group not part of this design
                continue;
            };
            let li = *levels.get(term.level).ok_or_else(|| {
                Error::invalid(format!("unknown level {:?} in group {}", term.level, term.group))
            })?;
            self.indices.push((self.groups[*gi].start + li) as u32);
            self.values.push(term.value);
        }
        let row = &mut self.indices[start..];
        let vals = &mut self.values[start..];
        let mut pairs: Vec<(u32, f64)> = row.iter().copied().zip(vals.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        for (k, (c, v)) in pairs.into_iter().enumerate() {
            row[k] = c;
            vals[k] = v;
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    pub fn finish(self) -> DesignMatrix {
        DesignMatrix {
            groups: self.groups,
            n_cols: self.n_cols,
            indptr: self.indptr,
            indices: self.indices,
            values: self.values,
            scales: Vec::new(),
        }
    }
}

impl Default for DesignBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl DesignMatrix {
    /// Dense rows, one group per `(name, width, penalized)` entry. Used for
    /// generic instances and tests.
    pub fn from_dense(rows: &[Vec<f64>], layout: &[(&'static str, usize, bool)]) -> Result<Self> {
        let width: usize = layout.iter().map(|l| l.1).sum();
        let mut b = DesignBuilder::new();
        for &(name, n, pen) in layout {
            // single columns are scalar groups named after themselves
            let levels: Vec<String> = if n == 1 {
                vec![name.to_string()]
            } else {
                (0..n).map(|i| i.to_string()).collect()
            };
            b = b.group(name, levels, pen);
        }
        let mut m = b.finish();
        m.indptr.clear();
        m.indptr.push(0);
        for r in rows {
            if r.len() != width {
                return Err(Error::invalid("dense row width does not match layout"));
            }
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    m.indices.push(j as u32);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn groups(&self) -> &[GroupSpan] {
        &self.groups
    }

    pub fn group(&self, name: &str) -> Option<&GroupSpan> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn scales(&self) -> &[ColumnScale] {
        &self.scales
    }

    /// `(group, level)` of every column in order.
    pub fn column_names(&self) -> Vec<(String, String)> {
        self.groups
            .iter()
            .flat_map(|g| g.levels.iter().map(move |l| (g.name.clone(), l.clone())))
            .collect()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    #[inline]
    pub fn dot_row(&self, i: usize, beta: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, &v)| beta[j as usize] * v).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter()
            .position(|&c| c as usize == j)
            .map_or(0.0, |k| val[k])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows())
            .map(|i| (0..self.n_cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn penalty_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_cols];
        for g in &self.groups {
            for j in g.range() {
                mask[j] = g.penalized;
            }
        }
        mask
    }

    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for &i in rows {
            let (idx, val) = self.row(i);
            indices.extend_from_slice(idx);
            values.extend_from_slice(val);
            indptr.push(indices.len());
        }
        DesignMatrix {
            groups: self.groups.clone(),
            n_cols: self.n_cols,
            indptr,
            indices,
            values,
            scales: self.scales.clone(),
        }
    }

    /// The same rows with the named groups removed.
    pub fn without_groups(&self, drop: &[&str]) -> DesignMatrix {
        let mut remap = vec![None; self.n_cols];
        let mut groups = Vec::new();
        let mut next = 0usize;
        for g in &self.groups {
            if drop.contains(&g.name.as_str()) {
                continue;
            }
            for (k, j) in g.range().enumerate() {
                remap[j] = Some((next + k) as u32);
            }
            groups.push(GroupSpan {
                start: next,
                ..g.clone()
            });
            next += g.len();
        }
        let mut indptr = Vec::with_capacity(self.indptr.len());
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n_rows() {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                if let Some(nj) = remap[j as usize] {
                    indices.push(nj);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        let scales = self
            .scales
            .iter()
            .filter_map(|s| remap[s.column].map(|c| ColumnScale { column: c as usize, ..*s }))
            .collect();
        DesignMatrix {
            groups,
            n_cols: next,
            indptr,
            indices,
            values,
            scales,
        }
    }

    /// Center and scale the named single-column groups in place, remembering
    /// the transform. Constant columns are centered with unit scale.
    pub fn standardize(&mut self, names: &[&str]) {
        let n = self.n_rows() as f64;
        let mut scales = Vec::new();
        for name in names {
            let Some(g) = self.group(name) else { continue };
            let col = g.start;
            let vals: Vec<f64> = (0..self.n_rows()).map(|i| self.get(i, col)).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            scales.push(ColumnScale { column: col, mean, sd });
        }
        // rebuild rows so every scaled column is stored explicitly
        let mut indptr = Vec::with_capacity(self.indptr.len());
        indptr.push(0);
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n_rows() {
            let (idx, val) = self.row(i);
            let mut row: Vec<(u32, f64)> = idx
                .iter()
                .copied()
                .zip(val.iter().copied())
                .filter(|(j, _)| !scales.iter().any(|s| s.column == *j as usize))
                .collect();
            for s in &scales {
                let raw = self.get(i, s.column);
                row.push((s.column as u32, (raw - s.mean) / s.sd));
            }
            row.sort_by_key(|p| p.0);
            for (j, v) in row {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
        self.scales.extend(scales);
    }

    /// Map coefficients fitted on the standardized columns back to the
    /// original covariate scale.
    pub fn unstandardize(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = beta.to_vec();
        let intercept = self.group(groups::INTERCEPT).map(|g| g.start);
        for s in &self.scales {
            out[s.column] = beta[s.column] / s.sd;
            if let Some(c) = intercept {
                out[c] -= beta[s.column] * s.mean / s.sd;
            }
        }
        out
    }
}

fn league_levels<'a>(teams: impl Iterator<Item = &'a TeamId>) -> Vec<String> {
    teams
        .map(|t| t.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Team-level ratio design: intercept, home, team, opponent, scorekeeper
/// generosity and scorekeeper bias (scorekeeper indicator times home).
pub fn build_team_design(obs: &[TeamGameRatio]) -> Result<(DesignMatrix, Vec<f64>)> {
    let teams: Vec<TeamId> = obs
        .iter()
        .flat_map(|o| [o.team.clone(), o.opponent.clone(), o.scorekeeper.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    build_team_design_with_teams(obs, &teams)
}

/// As [`build_team_design`] with an explicit league; unknown teams are an error.
pub fn build_team_design_with_teams(
    obs: &[TeamGameRatio],
    teams: &[TeamId],
) -> Result<(DesignMatrix, Vec<f64>)> {
    use groups::*;
    let levels = league_levels(teams.iter());
    if levels.len() < 2 {
        return Err(Error::invalid("team design needs at least two distinct teams"));
    }
    let mut b = DesignBuilder::new()
        .group(INTERCEPT, [INTERCEPT], false)
        .group(HOME, [HOME], false)
        .group(TEAM, levels.clone(), false)
        .group(OPPONENT, levels.clone(), false)
        .group(SK_GENEROSITY, levels.clone(), false)
        .group(SK_BIAS, levels, false);
    let mut y = Vec::with_capacity(obs.len());
    for o in obs {
        b.push_row(&team_terms(o))
            .map_err(|e| Error::invalid(format!("observation {}: {e}", o.game_id)))?;
        y.push(o.value);
    }
    Ok((b.finish(), y))
}

/// Contextual design for potential assists with standardized continuous
/// covariates. Every group except the intercept is penalized.
pub fn build_contextual_design(pas: &[PotentialAssist]) -> Result<(DesignMatrix, Vec<f64>)> {
    use groups::*;
    if pas.is_empty() {
        return Err(Error::invalid("no potential assists"));
    }
    let teams = league_levels(
        pas.iter()
            .flat_map(|p| [&p.team, &p.opponent, &p.scorekeeper]),
    );
    let passers: Vec<String> = pas
        .iter()
        .map(|p| p.passer.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let zones = CourtZone::ALL.map(|z| z.name());
    let pairs: Vec<&str> = CourtZone::ALL
        .iter()
        .flat_map(|&a| CourtZone::ALL.iter().map(move |&b| zone_pair_name(a, b)))
        .collect();
    let mut b = DesignBuilder::new()
        .group(INTERCEPT, [INTERCEPT], false)
        .group(HOME, [HOME], true)
        .group(TEAM, teams.clone(), true)
        .group(OPPONENT, teams.clone(), true)
        .group(SK_GENEROSITY, teams.clone(), true)
        .group(SK_BIAS, teams, true)
        .group(PASSER, passers, true)
        .group(POSITION, Position::ALL.map(|p| p.code()), true);
    for c in CONTINUOUS {
        b = b.group(c, [c], true);
    }
    b = b
        .group(PASSER_ZONE, zones, true)
        .group(SHOOTER_ZONE, zones, true)
        .group(ZONE_PAIR, pairs, true);
    let mut y = Vec::with_capacity(pas.len());
    for pa in pas {
        b.push_row(&contextual_terms(pa))?;
        y.push(if pa.label_recorded_assist { 1.0 } else { 0.0 });
    }
    let mut design = b.finish();
    design.standardize(&CONTINUOUS);
    Ok((design, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{GameId, PlayerId, RatioKind};

    fn ratio(game: &str, team: &str, opp: &str, home: bool, value: f64) -> TeamGameRatio {
        let t = TeamId::new(team).unwrap();
        let o = TeamId::new(opp).unwrap();
        TeamGameRatio {
            game_id: GameId::new(game).unwrap(),
            scorekeeper: if home { t.clone() } else { o.clone() },
            team: t,
            opponent: o,
            is_home: home,
            kind: RatioKind::Ar,
            value,
        }
    }

    pub(crate) fn pa(passer: &str, team: &str, opp: &str, home: bool, c1: f64, z7: CourtZone, z8: CourtZone, label: bool) -> PotentialAssist {
        let t = TeamId::new(team).unwrap();
        let o = TeamId::new(opp).unwrap();
        PotentialAssist {
            game_id: GameId::new("g").unwrap(),
            made_wall_time: 0,
            passer: PlayerId::new(passer).unwrap(),
            shooter: PlayerId::new("s").unwrap(),
            scorekeeper: if home { t.clone() } else { o.clone() },
            team: t,
            opponent: o,
            is_home: home,
            passer_position: Position::PointGuard,
            c1_possession_time: c1,
            c2_dribbles: 1,
            c3_travel_distance: 5.0,
            c4_pass_distance: 12.0,
            c5_passer_defender_dist: 4.0,
            c6_shooter_defender_dist: 8.0,
            c7_passer_zone: z7,
            c8_shooter_zone: z8,
            label_recorded_assist: label,
        }
    }

    #[test]
    fn two_team_design_matches_hand_construction() {
        let obs = vec![
            ratio("g1", "A", "B", true, 0.6),
            ratio("g1", "B", "A", false, 0.5),
            ratio("g2", "B", "A", true, 0.7),
            ratio("g2", "A", "B", false, 0.4),
        ];
        let (x, y) = build_team_design(&obs).unwrap();
        // columns: int, home, tA, tB, oA, oB, gA, gB, bA, bB
        let expected = vec![
            vec![1., 1., 1., 0., 0., 1., 1., 0., 1., 0.],
            vec![1., 0., 0., 1., 1., 0., 1., 0., 0., 0.],
            vec![1., 1., 0., 1., 1., 0., 0., 1., 0., 1.],
            vec![1., 0., 1., 0., 0., 1., 0., 1., 0., 0.],
        ];
        assert_eq!(x.n_cols(), 1 + 1 + 2 + 2 + 2 + 2);
        assert_eq!(x.to_dense(), expected);
        assert_eq!(y, vec![0.6, 0.5, 0.7, 0.4]);
    }

    #[test]
    fn bias_group_is_scorekeeper_times_home() {
        let obs = vec![
            ratio("g1", "A", "B", true, 0.6),
            ratio("g1", "B", "A", false, 0.5),
        ];
        let (x, _) = build_team_design(&obs).unwrap();
        let g = x.group(groups::SK_GENEROSITY).unwrap().clone();
        let b = x.group(groups::SK_BIAS).unwrap().clone();
        let h = x.group(groups::HOME).unwrap().start;
        for i in 0..x.n_rows() {
            for (gj, bj) in g.range().zip(b.range()) {
                assert_eq!(x.get(i, bj), x.get(i, gj) * x.get(i, h));
            }
        }
        // away row has an all-zero bias group
        assert!(b.range().all(|j| x.get(1, j) == 0.0));
    }

    #[test]
    fn single_team_and_unknown_team_are_errors() {
        let obs = vec![ratio("g1", "A", "A", true, 0.6)];
        assert!(build_team_design(&obs).is_err());
        let obs = vec![ratio("g1", "A", "C", true, 0.6)];
        let league = [TeamId::new("A").unwrap(), TeamId::new("B").unwrap()];
        assert!(build_team_design_with_teams(&obs, &league).is_err());
    }

    #[test]
    fn contextual_design_hand_built_rows() {
        let rows = vec![
            pa("p1", "A", "B", true, 1.0, CourtZone::Paint, CourtZone::Long2, true),
            pa("p2", "B", "A", false, 2.0, CourtZone::Arc3, CourtZone::Arc3, false),
            pa("p1", "A", "B", false, 3.0, CourtZone::Dunk, CourtZone::Corner3, true),
        ];
        let (x, y) = build_contextual_design(&rows).unwrap();
        assert_eq!(y, vec![1.0, 0.0, 1.0]);
        assert_eq!(x.n_cols(), 1 + 1 + 2 * 4 + 2 + 5 + 6 + 6 + 6 + 36);
        let col = |g: &str, l: &str| {
            let s = x.group(g).unwrap();
            s.start + s.levels.iter().position(|v| v == l).unwrap()
        };
        // row 0: home A vs B
        assert_eq!(x.get(0, col(groups::HOME, groups::HOME)), 1.0);
        assert_eq!(x.get(0, col(groups::SK_BIAS, "A")), 1.0);
        assert_eq!(x.get(0, col(groups::SK_GENEROSITY, "A")), 1.0);
        assert_eq!(x.get(0, col(groups::PASSER, "p1")), 1.0);
        assert_eq!(x.get(0, col(groups::ZONE_PAIR, "Paint>Long2")), 1.0);
        // row 1: away B at A, bias group empty, scorekeeper A
        assert_eq!(x.get(1, col(groups::HOME, groups::HOME)), 0.0);
        assert!(x.group(groups::SK_BIAS).unwrap().range().all(|j| x.get(1, j) == 0.0));
        assert_eq!(x.get(1, col(groups::SK_GENEROSITY, "A")), 1.0);
        // standardized c1: values 1,2,3 -> mean 2, sd sqrt(2/3)
        let c1 = col(groups::C1, groups::C1);
        let sd = (2.0f64 / 3.0).sqrt();
        assert!((x.get(0, c1) + 1.0 / sd).abs() < 1e-12);
        assert!(x.get(1, c1).abs() < 1e-12);
        // constant covariate c2 is centered to zero
        assert_eq!(x.get(2, col(groups::C2, groups::C2)), 0.0);
    }

    #[test]
    fn zone_pair_is_outer_product_of_zone_columns() {
        let mut rows = Vec::new();
        for (i, &a) in CourtZone::ALL.iter().enumerate() {
            for &b in CourtZone::ALL.iter().skip(i % 3) {
                rows.push(pa("p", "A", "B", i % 2 == 0, 1.0 + i as f64, a, b, true));
            }
        }
        let (x, _) = build_contextual_design(&rows).unwrap();
        let pz = x.group(groups::PASSER_ZONE).unwrap().clone();
        let sz = x.group(groups::SHOOTER_ZONE).unwrap().clone();
        let zp = x.group(groups::ZONE_PAIR).unwrap().clone();
        for i in 0..x.n_rows() {
            for a in 0..6 {
                for b in 0..6 {
                    let expect = x.get(i, pz.start + a) * x.get(i, sz.start + b);
                    assert_eq!(x.get(i, zp.start + a * 6 + b), expect);
                }
            }
        }
    }

    #[test]
    fn standardized_columns_have_zero_mean() {
        let rows: Vec<_> = (0..50)
            .map(|i| pa("p", "A", "B", true, 0.1 + 0.13 * i as f64, CourtZone::Paint, CourtZone::Paint, i % 3 == 0))
            .collect();
        let (x, _) = build_contextual_design(&rows).unwrap();
        for s in x.scales() {
            let mean: f64 = (0..x.n_rows()).map(|i| x.get(i, s.column)).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-12);
        }
    }

    #[test]
    fn unstandardize_preserves_linear_predictor() {
        let rows: Vec<_> = (0..20)
            .map(|i| pa("p", "A", "B", i % 2 == 0, 0.5 + 0.3 * i as f64, CourtZone::Paint, CourtZone::Arc3, true))
            .collect();
        let (x, _) = build_contextual_design(&rows).unwrap();
        let beta: Vec<f64> = (0..x.n_cols()).map(|j| (j as f64 * 0.37).sin()).collect();
        let orig = x.unstandardize(&beta);
        let names = x.column_names();
        for (i, r) in rows.iter().enumerate() {
            let std_eta = x.dot_row(i, &beta);
            let raw_eta: f64 = contextual_terms(r)
                .iter()
                .map(|t| {
                    let j = names.iter().position(|(g, l)| g == t.group && l == t.level).unwrap();
                    orig[j] * t.value
                })
                .sum();
            assert!((std_eta - raw_eta).abs() < 1e-10);
        }
    }

    #[test]
    fn dropping_groups_keeps_other_values() {
        let rows = vec![
            pa("p1", "A", "B", true, 1.0, CourtZone::Paint, CourtZone::Long2, true),
            pa("p2", "B", "A", false, 2.0, CourtZone::Arc3, CourtZone::Arc3, false),
        ];
        let (x, _) = build_contextual_design(&rows).unwrap();
        let d = x.without_groups(&[groups::SK_GENEROSITY, groups::SK_BIAS]);
        assert_eq!(d.n_cols(), x.n_cols() - 4);
        assert!(d.group(groups::SK_BIAS).is_none());
        let c = d.group(groups::C1).unwrap().start;
        let c0 = x.group(groups::C1).unwrap().start;
        assert_eq!(d.get(0, c), x.get(0, c0));
        assert_eq!(d.scales().len(), 6);
    }
}
