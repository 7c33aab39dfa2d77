use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImplKind {
    Norec,
    Cnorec,
    CnorecAm,
    CnorecCm,
    Dtms2,
    CmLib,
}

impl ImplKind {
    pub const ALL: [ImplKind; 6] = [
        ImplKind::Norec,
        ImplKind::Cnorec,
        ImplKind::CnorecAm,
        ImplKind::CnorecCm,
        ImplKind::Dtms2,
        ImplKind::CmLib,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImplKind::Norec => "norec",
            ImplKind::Cnorec => "cnorec",
            ImplKind::CnorecAm => "cnorec-am",
            ImplKind::CnorecCm => "cnorec-cm",
            ImplKind::Dtms2 => "dtms2",
            ImplKind::CmLib => "cm-lib",
        }
    }

    /// Whether histories are transactional (as opposed to library-level).
    pub fn is_tm(self) -> bool {
        self != ImplKind::CmLib
    }

    pub fn has_crashes(self) -> bool {
        self != ImplKind::Norec
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutant {
    NoUndoLog,
    NoRecoveryRestore,
    SkipV5GlbCheck,
}

impl Mutant {
    pub const ALL: [Mutant; 3] = [
        Mutant::NoUndoLog,
        Mutant::NoRecoveryRestore,
        Mutant::SkipV5GlbCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutant::NoUndoLog => "no-undo-log",
            Mutant::NoRecoveryRestore => "no-recovery-restore",
            Mutant::SkipV5GlbCheck => "skip-v5-glb-check",
        }
    }

    pub fn applies_to(self, kind: ImplKind) -> bool {
        match self {
            Mutant::NoUndoLog | Mutant::NoRecoveryRestore => {
                matches!(kind, ImplKind::CnorecCm | ImplKind::CmLib)
            }
            Mutant::SkipV5GlbCheck => matches!(
                kind,
                ImplKind::Norec | ImplKind::Cnorec | ImplKind::CnorecAm | ImplKind::CnorecCm
            ),
        }
    }
}

macro_rules! named_enum_io {
    ($ty:ty, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = ConfigError;

            fn from_str(s: &str) -> Result<Self, ConfigError> {
                <$ty>::ALL
                    .into_iter()
                    .find(|k| k.name() == s)
                    .ok_or_else(|| ConfigError::Unknown($what, s.to_string()))
            }
        }
    };
}

named_enum_io!(ImplKind, "implementation");
named_enum_io!(Mutant, "mutant");

/// A probability `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self, ConfigError> {
        if den == 0 || num > den {
            return Err(ConfigError::Invalid(format!("{num}/{den} is not in [0,1]")));
        }
        Ok(Ratio { num, den })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = ConfigError;

    /// Accepts `a/b` or a decimal such as `0.05`.
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Invalid(format!("bad probability `{s}`"));
        if let Some((a, b)) = s.split_once('/') {
            return Ratio::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let int: u32 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Ratio::new(int.checked_mul(den).ok_or_else(bad)? + frac, den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown {0} `{1}`")]
    Unknown(&'static str, String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub impl_kind: ImplKind,
    pub txs_per_era: u16,
    pub eras: u16,
    pub locs: u8,
    pub vals: u8,
    pub steps: usize,
    pub seed: u64,
    pub crash_prob: Ratio,
    pub mutant: Option<Mutant>,
    pub depth: usize,
    pub max_states: usize,
}

impl RunConfig {
    pub fn new(impl_kind: ImplKind) -> Self {
        RunConfig {
            impl_kind,
            txs_per_era: 2,
            eras: 1,
            locs: 1,
            vals: 2,
            steps: 200,
            seed: 0,
            crash_prob: Ratio { num: 1, den: 20 },
            mutant: None,
            depth: 1_000_000,
            max_states: 2_000_000,
        }
    }

    pub fn total_txs(&self) -> u16 {
        self.txs_per_era * self.eras
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RunConfig { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if self.eras == 0 {
            return fail("eras must be at least 1".into());
        }
        if self.txs_per_era == 0 || self.locs == 0 || self.vals == 0 {
            return fail("txs, locs and vals must be at least 1".into());
        }
        if u32::from(self.txs_per_era) * u32::from(self.eras) > 60 {
            return fail("at most 60 transactions in total".into());
        }
        if self.locs > 8 || self.vals > 16 {
            return fail("at most 8 locations and 16 values".into());
        }
        if self.eras > 1 && !self.impl_kind.has_crashes() {
            return fail(format!("{} has no crash action, so eras must be 1", self.impl_kind));
        }
        if let Some(m) = self.mutant {
            if !m.applies_to(self.impl_kind) {
                return fail(format!("mutant {m} does not apply to {}", self.impl_kind));
            }
        }
        Ok(())
    }

    /// Command-line flags that reproduce this run.
    pub fn replay_args(&self) -> String {
        let mut s = format!(
            "--impl {} --txs {} --eras {} --locs {} --vals {} --steps {} --seed {} --crash-prob {}",
            self.impl_kind,
            self.txs_per_era,
            self.eras,
            self.locs,
            self.vals,
            self.steps,
            self.seed,
            self.crash_prob
        );
        if let Some(m) = self.mutant {
            s.push_str(&format!(" --mutant {m}"));
        }
        s
    }
}
