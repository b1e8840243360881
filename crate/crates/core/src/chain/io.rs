use std::io::Write;

use super::path::ChainPath;
use crate::error::Result;

/// Writes paths as CSV rows `path_index,k,t,x`.
pub fn write_paths_csv<W: Write>(out: &mut W, paths: &[ChainPath]) -> Result<()> {
    writeln!(out, "path_index,k,t,x")?;
    for (j, p) in paths.iter().enumerate() {
        for (k, x) in p.nodes.iter().enumerate() {
            writeln!(out, "{j},{k},{},{x}", k as f64 * p.h)?;
        }
    }
    Ok(())
}

/// Writes per-path values as CSV rows `path_index,value`.
pub fn write_values_csv<W: Write>(out: &mut W, values: &[f64]) -> Result<()> {
    writeln!(out, "path_index,value")?;
    for (j, v) in values.iter().enumerate() {
        writeln!(out, "{j},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let p = ChainPath { h: 0.5, y0: 0.0, horizon: 1.0, nodes: vec![0.0, 0.5, 0.0] };
        let mut buf = Vec::new();
        write_paths_csv(&mut buf, &[p]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "path_index,k,t,x\n0,0,0,0\n0,1,0.5,0.5\n0,2,1,0\n");
        let mut buf = Vec::new();
        write_values_csv(&mut buf, &[1.5, -2.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "path_index,value\n0,1.5\n1,-2\n");
    }
}
