//! Physical inputs and every quantity derived from them.
//!
//! The potential scale follows from expanding the dipole potential
//! `U = -Re{α} I / (2 c ε₀)` of the three-mode field to second order around the
//! optical axis. Two scales appear:
//!
//! * [`DerivedParams::potential_depth`] `= Re{α} P / (c π w₀² ε₀)` (energy), the
//!   depth of a pure Gaussian well of power `P`;
//! * [`DerivedParams::v0`] `= 2 · potential_depth / w₀²` (energy per area), the
//!   coefficient of the quadratic form `V = v0 (k₋ x² + k₊ y² − k_xy x y)`.
//!
//! Recoil heating uses the standard dipole-scattering result: the scattered power
//! of the Gaussian component, `P_scat = σ_scat · I_G · 2P/(π w₀²)` with
//! `σ_scat = k⁴ |α|² / (6π ε₀²)`, deposits energy along axis `q` at the rate
//! `C_q ħ ω_L P_scat / (m c²)`, with geometric factors `C_x = 1/5`, `C_y = 2/5`.
//! The phonon rate at oscillation frequency `Ω_q` is that power over `ħ Ω_q`.
//!
//! The localization rate is `Λ_q = Γ_q / (2 q_zpf²)` with `q_zpf` evaluated at the
//! same `Ω_q`, so that the momentum diffusion `2ħ²Λ_q` heats the motion by
//! exactly `ħ Ω_q Γ_q` per unit time. With this pairing `Λ_q` does not depend on
//! which oscillation frequency is used to express `Γ_q`.


#[allow(unused_imports)]
use num_traits::Float;
use crate::consts::{EPSILON_0, HBAR, PI, SPEED_OF_LIGHT, TAU};
use crate::error::{Error, Result};

/// Geometric recoil factors `C = [1/5, 2/5, A² + 2/5]` for the transverse axes.
pub const RECOIL_GEOMETRY_X: f64 = 1.0 / 5.0;
pub const RECOIL_GEOMETRY_Y: f64 = 2.0 / 5.0;

/// Largest radius/wavelength ratio accepted as "dipole regime".
pub const DIPOLE_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn recoil_geometry(self) -> f64 {
        match self {
            Axis::X => RECOIL_GEOMETRY_X,
            Axis::Y => RECOIL_GEOMETRY_Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    /// Sphere radius [m].
    pub radius: f64,
    /// Mass density [kg/m³].
    pub density: f64,
    pub relative_permittivity: f64,
}

impl ParticleParams {
    /// Silica sphere (ρ = 1850 kg/m³, ε = 2.1 at 1550 nm).
    pub fn silica(radius: f64) -> Self {
        Self {
            radius,
            density: 1850.0,
            relative_permittivity: 2.1,
        }
    }

    pub fn mass(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3) * self.density
    }

    /// Clausius–Mossotti polarizability [C m²/V].
    pub fn polarizability(&self) -> f64 {
        let eps = self.relative_permittivity;
        4.0 * PI * EPSILON_0 * self.radius.powi(3) * (eps - 1.0) / (eps + 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        positive("radius", self.radius)?;
        positive("density", self.density)?;
        if !(self.relative_permittivity > 1.0) || !self.relative_permittivity.is_finite() {
            return Err(Error::NonPhysicalPermittivity(self.relative_permittivity));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// Total optical power [W].
    pub power: f64,
    /// Vacuum wavelength [m].
    pub wavelength: f64,
    /// Waist `w₀` shared by all three modes [m].
    pub waist: f64,
    pub numerical_aperture: f64,
    /// Fraction `I_L` of the power in the `l = ±2` modes.
    pub laguerre_fraction: f64,
    /// Rotation rate `Ω` of the saddle, `θ = Ω t` [rad/s].
    pub rotation_rate: f64,
    /// Viscous damping rate `γ` [1/s]. Enters the stability analysis only.
    pub gas_damping: f64,
    /// Axial recoil constant `A`. Carried for completeness; the axial motion
    /// is not simulated.
    pub axial_recoil_constant: f64,
}

impl TrapConfig {
    /// Builds a trap whose waist follows the paraxial relation `w₀ = λ / (π NA)`.
    pub fn from_numerical_aperture(
        power: f64,
        wavelength: f64,
        numerical_aperture: f64,
        laguerre_fraction: f64,
    ) -> Self {
        Self {
            power,
            wavelength,
            waist: wavelength / (PI * numerical_aperture),
            numerical_aperture,
            laguerre_fraction,
            rotation_rate: 0.0,
            gas_damping: 0.0,
            axial_recoil_constant: 0.0,
        }
    }

    pub fn with_rotation(mut self, rotation_rate: f64) -> Self {
        self.rotation_rate = rotation_rate;
        self
    }

    pub fn with_laguerre_fraction(mut self, laguerre_fraction: f64) -> Self {
        self.laguerre_fraction = laguerre_fraction;
        self
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    /// `I_G = 1 − I_L`.
    pub fn gaussian_fraction(&self) -> f64 {
        1.0 - self.laguerre_fraction
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// True when the static potential is a saddle (`I_L > 0.2`, i.e. `4 I_L > I_G`).
    pub fn has_saddle(&self) -> bool {
        4.0 * self.laguerre_fraction > self.gaussian_fraction()
    }

    pub fn validate(&self) -> Result<()> {
        positive("power", self.power)?;
        positive("wavelength", self.wavelength)?;
        positive("waist", self.waist)?;
        let il = self.laguerre_fraction;
        if !(0.0..=1.0).contains(&il) {
            return Err(Error::InvalidParameter {
                name: "laguerre_fraction",
                value: il,
                reason: "must lie in [0, 1]",
            });
        }
        if !(self.gas_damping >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gas_damping",
                value: self.gas_damping,
                reason: "must be non-negative",
            });
        }
        if !self.rotation_rate.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rotation_rate",
                value: self.rotation_rate,
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// The Gaussian tweezer the particle is prepared in before transfer. Its
/// zero-point amplitudes define the internal length and momentum units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTweezer {
    /// Angular frequencies [rad/s].
    pub frequency_x: f64,
    pub frequency_y: f64,
    /// Mean phonon numbers of the initial thermal state.
    pub occupation_x: f64,
    pub occupation_y: f64,
}

impl ReferenceTweezer {
    pub fn isotropic(frequency: f64, occupation: f64) -> Self {
        Self {
            frequency_x: frequency,
            frequency_y: frequency,
            occupation_x: occupation,
            occupation_y: occupation,
        }
    }

    pub fn frequency(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.frequency_x,
            Axis::Y => self.frequency_y,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("frequency_x", self.frequency_x)?;
        positive("frequency_y", self.frequency_y)?;
        for (name, n) in [("occupation_x", self.occupation_x), ("occupation_y", self.occupation_y)] {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: n,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// [kg]
    pub mass: f64,
    /// Re{α} [C m²/V]
    pub polarizability_real: f64,
    /// Depth scale `Re{α} P / (c π w₀² ε₀)` of the normalized intensity [J].
    pub potential_depth: f64,
    /// Quadratic-form coefficient `2 · potential_depth / w₀²` [J/m²].
    pub v0: f64,
    /// Reference-tweezer zero-point amplitudes [m] and momenta [kg m/s].
    pub x_zpf: f64,
    pub y_zpf: f64,
    pub p_zpf_x: f64,
    pub p_zpf_y: f64,
    /// Recoil heating power deposited along each axis [W]. Independent of the
    /// oscillation frequency.
    pub recoil_power_x: f64,
    pub recoil_power_y: f64,
    /// Phonon recoil rates `Γ_q` at the reference-tweezer frequencies [1/s].
    pub recoil_rate_x: f64,
    pub recoil_rate_y: f64,
    /// `Λ_q` [1/(m² s)].
    pub localization_rate_x: f64,
    pub localization_rate_y: f64,
    pub absorbed_ratio: f64,
    /// Curvature frequencies squared of the static saddle [rad²/s²]. Positive
    /// `omega_sq_x` means the x axis is anti-confining.
    pub omega_sq_x: f64,
    pub omega_sq_y: f64,
}

impl DerivedParams {
    /// Phonon recoil rate along `axis` for a particle oscillating at `frequency`.
    pub fn recoil_rate_at(&self, axis: Axis, frequency: f64) -> Result<f64> {
        if !(frequency > 0.0) {
            return Err(Error::NonPositiveFrequency(frequency));
        }
        let power = match axis {
            Axis::X => self.recoil_power_x,
            Axis::Y => self.recoil_power_y,
        };
        Ok(power / (HBAR * frequency))
    }

    pub fn localization_rate(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.localization_rate_x,
            Axis::Y => self.localization_rate_y,
        }
    }

    pub fn zpf(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x_zpf,
            Axis::Y => self.y_zpf,
        }
    }

    pub fn p_zpf(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.p_zpf_x,
            Axis::Y => self.p_zpf_y,
        }
    }
}

/// Computes all derived quantities. Pure and deterministic.
pub fn derive(
    particle: &ParticleParams,
    trap: &TrapConfig,
    reference: &ReferenceTweezer,
) -> Result<DerivedParams> {
    particle.validate()?;
    trap.validate()?;
    reference.validate()?;
    let ratio = particle.radius / trap.wavelength;
    if ratio >= DIPOLE_LIMIT {
        return Err(Error::DipoleRegime { ratio });
    }

    let mass = particle.mass();
    let alpha = particle.polarizability();
    let w0 = trap.waist;
    let potential_depth = alpha * trap.power / (SPEED_OF_LIGHT * PI * w0 * w0 * EPSILON_0);
    let v0 = 2.0 * potential_depth / (w0 * w0);

    let x_zpf = zero_point_amplitude(mass, reference.frequency_x);
    let y_zpf = zero_point_amplitude(mass, reference.frequency_y);

    let recoil_power_x = recoil_power(trap, alpha, mass, Axis::X);
    let recoil_power_y = recoil_power(trap, alpha, mass, Axis::Y);
    let recoil_rate_x = recoil_power_x / (HBAR * reference.frequency_x);
    let recoil_rate_y = recoil_power_y / (HBAR * reference.frequency_y);

    let ig = trap.gaussian_fraction();
    let il = trap.laguerre_fraction;
    let cross = 2.0 * (ig * il).sqrt();

    Ok(DerivedParams {
        mass,
        polarizability_real: alpha,
        potential_depth,
        v0,
        x_zpf,
        y_zpf,
        p_zpf_x: HBAR / (2.0 * x_zpf),
        p_zpf_y: HBAR / (2.0 * y_zpf),
        recoil_power_x,
        recoil_power_y,
        recoil_rate_x,
        recoil_rate_y,
        localization_rate_x: localization_rate(recoil_rate_x, x_zpf),
        localization_rate_y: localization_rate(recoil_rate_y, y_zpf),
        absorbed_ratio: absorbed_ratio(trap),
        omega_sq_x: 2.0 * v0 * (cross - ig) / mass,
        omega_sq_y: 2.0 * v0 * (cross + ig) / mass,
    })
}

/// `q_zpf = √(ħ / (2 m Ω))`.
pub fn zero_point_amplitude(mass: f64, frequency: f64) -> f64 {
    (HBAR / (2.0 * mass * frequency)).sqrt()
}

fn recoil_power(trap: &TrapConfig, alpha: f64, mass: f64, axis: Axis) -> f64 {
    let k = trap.wavenumber();
    let w0 = trap.waist;
    let cross_section = k.powi(4) * alpha * alpha / (6.0 * PI * EPSILON_0 * EPSILON_0);
    let peak_intensity = 2.0 * trap.gaussian_fraction() * trap.power / (PI * w0 * w0);
    let scattered = cross_section * peak_intensity;
    let laser_frequency = SPEED_OF_LIGHT * k;
    axis.recoil_geometry() * HBAR * laser_frequency * scattered / (mass * SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Phonon recoil rate `Γ_q` [1/s] along `axis` at oscillation frequency `frequency`.
pub fn recoil_rate(
    trap: &TrapConfig,
    particle: &ParticleParams,
    axis: Axis,
    frequency: f64,
) -> Result<f64> {
    if !(frequency > 0.0) {
        return Err(Error::NonPositiveFrequency(frequency));
    }
    let power = recoil_power(trap, particle.polarizability(), particle.mass(), axis);
    Ok(power / (HBAR * frequency))
}

/// `Λ = Γ / (2 q_zpf²)`.
pub fn localization_rate(recoil_rate: f64, zpf: f64) -> f64 {
    recoil_rate / (2.0 * zpf * zpf)
}

/// Ratio of power absorbed in the saddle beam to that in a pure Gaussian beam
/// of equal power, in the dipole limit.
pub fn absorbed_ratio(trap: &TrapConfig) -> f64 {
    1.0 - trap.laguerre_fraction
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_setup(il: f64) -> (ParticleParams, TrapConfig, ReferenceTweezer) {
        (
            ParticleParams::silica(50e-9),
            TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, il),
            ReferenceTweezer::isotropic(TAU * 150e3, 0.8),
        )
    }

    #[test]
    fn mass_of_50nm_silica() {
        // (4/3)π (5e-8)³ · 1850, evaluated by hand: 9.6866e-19 kg
        let m = ParticleParams::silica(50e-9).mass();
        assert_relative_eq!(m, 9.686_577e-19, max_relative = 1e-6);
    }

    #[test]
    fn zero_point_amplitude_at_150khz() {
        let (p, t, r) = paper_setup(0.5);
        let d = derive(&p, &t, &r).unwrap();
        // √(ħ / (2 · 9.6866e-19 · 2π·1.5e5)) = 7.5998e-12 m
        assert_relative_eq!(d.x_zpf, 7.5998e-12, max_relative = 1e-4);
        assert_relative_eq!(d.x_zpf * d.p_zpf_x, HBAR / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn pure_laguerre_beam_has_no_recoil() {
        let (p, t, r) = paper_setup(1.0);
        let d = derive(&p, &t, &r).unwrap();
        assert_eq!(d.recoil_rate_x, 0.0);
        assert_eq!(d.recoil_rate_y, 0.0);
        assert_eq!(d.localization_rate_x, 0.0);
    }

    #[test]
    fn y_recoil_is_twice_x() {
        for il in [0.0, 0.3, 0.9] {
            let (p, t, r) = paper_setup(il);
            let d = derive(&p, &t, &r).unwrap();
            assert_relative_eq!(d.recoil_rate_y, 2.0 * d.recoil_rate_x, max_relative = 1e-14);
        }
    }

    #[test]
    fn recoil_rate_scalings() {
        let (p, t, _) = paper_setup(0.5);
        let w = TAU * 1e5;
        let base = recoil_rate(&t, &p, Axis::X, w).unwrap();
        // Γ ∝ 1/Ω: energy deposition does not depend on the trap frequency.
        assert_relative_eq!(recoil_rate(&t, &p, Axis::X, 2.0 * w).unwrap(), base / 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            recoil_rate(&t.with_power(2.0 * t.power), &p, Axis::X, w).unwrap(),
            2.0 * base,
            max_relative = 1e-14
        );
        let ig_half = t.with_laguerre_fraction(0.75);
        assert_relative_eq!(recoil_rate(&ig_half, &p, Axis::X, w).unwrap(), base / 2.0, max_relative = 1e-14);
        // quadratic in α: α ∝ R³ at fixed ε, mass ∝ R³ → Γ ∝ R³ overall
        let mut big = p;
        big.radius *= 2.0;
        assert_relative_eq!(recoil_rate(&t, &big, Axis::X, w).unwrap(), 8.0 * base, max_relative = 1e-12);
        // k⁴ from the cross-section and one more k from the photon energy, at fixed waist
        let mut short = t;
        short.wavelength /= 2.0;
        assert_relative_eq!(recoil_rate(&short, &p, Axis::X, w).unwrap(), 32.0 * base, max_relative = 1e-12);
        assert!(matches!(recoil_rate(&t, &p, Axis::X, 0.0), Err(Error::NonPositiveFrequency(_))));
    }

    #[test]
    fn localization_rate_maps_heating() {
        assert_eq!(localization_rate(0.0, 1e-12), 0.0);
        let (p, t, r) = paper_setup(0.5);
        let d = derive(&p, &t, &r).unwrap();
        // 2ħ²Λ / (2m) = ħ Ω Γ
        let heating = 2.0 * HBAR * HBAR * d.localization_rate_x / (2.0 * d.mass);
        assert_relative_eq!(heating, HBAR * r.frequency_x * d.recoil_rate_x, max_relative = 1e-12);
        // Λ is independent of the frequency used to express Γ.
        let w = TAU * 27e3;
        let g = d.recoil_rate_at(Axis::X, w).unwrap();
        let lam = localization_rate(g, zero_point_amplitude(d.mass, w));
        assert_relative_eq!(lam, d.localization_rate_x, max_relative = 1e-12);
    }

    #[test]
    fn absorbed_ratio_examples() {
        let t = |il| TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, il);
        assert_relative_eq!(absorbed_ratio(&t(0.9)), 0.1, max_relative = 1e-12);
        assert_eq!(absorbed_ratio(&t(0.0)), 1.0);
        assert_eq!(absorbed_ratio(&t(0.5)), 0.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (mut p, t, r) = paper_setup(0.5);
        p.radius = 0.4e-6;
        assert!(matches!(derive(&p, &t, &r), Err(Error::DipoleRegime { .. })));
        let (mut p, t, r) = paper_setup(0.5);
        p.relative_permittivity = 0.9;
        assert!(matches!(derive(&p, &t, &r), Err(Error::NonPhysicalPermittivity(_))));
        let (p, t, r) = paper_setup(1.2);
        assert!(derive(&p, &t, &r).is_err());
    }

    #[test]
    fn curvature_frequencies() {
        for il in [0.05, 0.19, 0.21, 0.5, 0.9, 0.999] {
            let (p, t, r) = paper_setup(il);
            let d = derive(&p, &t, &r).unwrap();
            assert!(d.omega_sq_y > d.omega_sq_x);
            assert_eq!(d.omega_sq_x > 0.0, il > 0.2);
            assert_eq!(t.has_saddle(), il > 0.2);
        }
    }

    #[test]
    fn saddle_boundary_is_exact() {
        let t = TrapConfig::from_numerical_aperture(0.07, 1.55e-6, 0.6, 0.2);
        assert!(!t.has_saddle());
        assert!(t.with_laguerre_fraction(0.2 + 1e-12).has_saddle());
    }

    #[test]
    fn derive_is_deterministic() {
        let (p, t, r) = paper_setup(0.7);
        assert_eq!(derive(&p, &t, &r).unwrap(), derive(&p, &t, &r).unwrap());
    }
}
