//! CSV writers for diagnostic outputs. Reals use 17 significant digits.

use std::io::Write;

use super::TVDMCurve;
use crate::error::Result;

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_metadata<W: Write + ?Sized>(w: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_tvd_curve<W: Write>(mut w: W, curve: &TVDMCurve, metadata: &[(String, String)]) -> Result<()> {
    write_metadata(&mut w, metadata)?;
    writeln!(w, "t,value")?;
    for (t, v) in curve.iterations.iter().zip(&curve.values) {
        writeln!(w, "{t},{}", format_real(*v))?;
    }
    Ok(())
}

pub fn write_acf<W: Write>(mut w: W, values: &[f64], metadata: &[(String, String)]) -> Result<()> {
    write_metadata(&mut w, metadata)?;
    writeln!(w, "tau,value")?;
    for (tau, v) in values.iter().enumerate() {
        writeln!(w, "{tau},{}", format_real(*v))?;
    }
    Ok(())
}
