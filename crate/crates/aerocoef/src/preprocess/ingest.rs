//! Raw flight CSV ingestion and unit conversion.
//!
//! Raw files use customary aeronautic units; everything downstream is SI.
//! The schema is fixed:
//!
//! ```text
//! time_s, alt_ft, tas_kt, mach, aoa_deg, pitch_deg_or_gamma_deg, mass_kg,
//! ff_kgph, sat_c, heading_deg, wind_kt
//! ```
//!
//! A header row is required. Missing cells mark the whole row invalid (the
//! grid slot is kept, the sample masked out and counted); an unparsable cell
//! is an error with its row index. Air density is not recorded: it is
//! computed from pressure altitude and static air temperature at ingestion.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::FlightFrame;
use crate::physics::isa::isa_density;

pub const FT_TO_M: f64 = 0.3048;
pub const KT_TO_MS: f64 = 0.514444;
pub const KGPH_TO_KGPS: f64 = 1.0 / 3600.0;
pub const C_TO_K: f64 = 273.15;
pub const DEG_TO_RAD: f64 = std::f64::consts::PI / 180.0;

pub const RAW_HEADER: &str =
    "time_s,alt_ft,tas_kt,mach,aoa_deg,pitch_deg_or_gamma_deg,mass_kg,ff_kgph,sat_c,heading_deg,wind_kt";

/// One raw row in recorded units; `None` marks a missing cell.
#[derive(Debug, Clone, Default)]
pub struct RawFlight {
    pub flight_id: String,
    pub rows: Vec<[Option<f64>; 11]>,
}

/// Ingestion result: the SI frame plus how many rows were masked out.
#[derive(Debug, Clone)]
pub struct RawIngest {
    pub frame: FlightFrame,
    pub dropped_rows: usize,
}

/// Convert a raw flight to an SI [`FlightFrame`]. Rows with any missing cell
/// keep their grid slot but are masked invalid and counted.
pub fn to_si(raw: &RawFlight) -> Result<RawIngest> {
    let n = raw.rows.len();
    let mut frame = FlightFrame {
        flight_id: raw.flight_id.clone(),
        time: vec![0.0; n],
        altitude: vec![0.0; n],
        tas: vec![0.0; n],
        mach: vec![0.0; n],
        alpha: vec![0.0; n],
        gamma: vec![0.0; n],
        mass: vec![0.0; n],
        fuel_flow: vec![0.0; n],
        sat: vec![0.0; n],
        rho: vec![0.0; n],
        heading: vec![0.0; n],
        wind: vec![0.0; n],
        valid: vec![false; n],
    };
    let mut dropped = 0usize;
    for (i, row) in raw.rows.iter().enumerate() {
        let time = row[0];
        // The grid needs every time stamp even in masked rows.
        frame.time[i] = time.unwrap_or(i as f64);
        if row.iter().any(|c| c.is_none()) {
            dropped += 1;
            continue;
        }
        let altitude = row[1].unwrap() * FT_TO_M;
        let sat = row[8].unwrap() + C_TO_K;
        frame.altitude[i] = altitude;
        frame.tas[i] = row[2].unwrap() * KT_TO_MS;
        frame.mach[i] = row[3].unwrap();
        frame.alpha[i] = row[4].unwrap() * DEG_TO_RAD;
        frame.gamma[i] = row[5].unwrap() * DEG_TO_RAD;
        frame.mass[i] = row[6].unwrap();
        frame.fuel_flow[i] = row[7].unwrap() * KGPH_TO_KGPS;
        frame.sat[i] = sat;
        frame.rho[i] = isa_density(altitude, sat)?;
        frame.heading[i] = row[9].unwrap() * DEG_TO_RAD;
        frame.wind[i] = row[10].unwrap() * KT_TO_MS;
        frame.valid[i] = true;
    }
    Ok(RawIngest { frame, dropped_rows: dropped })
}

/// Read a raw flight CSV and convert to SI.
pub fn read_flight_csv(path: &Path) -> Result<RawIngest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.trim(),
        None => {
            return Err(Error::Schema {
                file: path.display().to_string(),
                row: 0,
                msg: "empty file".into(),
            })
        }
    };
    let expected: Vec<&str> = RAW_HEADER.split(',').collect();
    let got: Vec<&str> = header.split(',').map(str::trim).collect();
    if got != expected {
        return Err(Error::Schema {
            file: path.display().to_string(),
            row: 1,
            msg: format!("missing or wrong columns: expected `{RAW_HEADER}`, got `{header}`"),
        });
    }
    let flight_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "flight".into());
    let mut raw = RawFlight { flight_id, rows: Vec::new() };
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 11 {
            return Err(Error::Schema {
                file: path.display().to_string(),
                row: lineno + 1,
                msg: format!("expected 11 cells, got {}", cells.len()),
            });
        }
        let mut row = [None; 11];
        for (j, cell) in cells.iter().enumerate() {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            row[j] = Some(cell.parse::<f64>().map_err(|e| Error::Schema {
                file: path.display().to_string(),
                row: lineno + 1,
                msg: format!("column {}: {e}", expected[j]),
            })?);
        }
        raw.rows.push(row);
    }
    to_si(&raw)
}

/// Write an SI frame back out in the raw schema (used by the synthetic
/// generator). Floats are printed in shortest round-trip form, so reading the
/// file back reproduces the values to the last bit of the unit conversion.
pub fn write_flight_csv(frame: &FlightFrame, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(frame.len() * 96);
    out.push_str(RAW_HEADER);
    out.push('\n');
    for i in 0..frame.len() {
        if !frame.valid[i] {
            // Masked slots round-trip as missing cells.
            out.push_str(&format!("{},,,,,,,,,,\n", frame.time[i]));
            continue;
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            frame.time[i],
            frame.altitude[i] / FT_TO_M,
            frame.tas[i] / KT_TO_MS,
            frame.mach[i],
            frame.alpha[i] / DEG_TO_RAD,
            frame.gamma[i] / DEG_TO_RAD,
            frame.mass[i],
            frame.fuel_flow[i] / KGPH_TO_KGPS,
            frame.sat[i] - C_TO_K,
            frame.heading[i] / DEG_TO_RAD,
            frame.wind[i] / KT_TO_MS,
        ));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn full_row(alt_ft: f64, sat_c: f64, tas_kt: f64) -> [Option<f64>; 11] {
        [
            Some(0.0),
            Some(alt_ft),
            Some(tas_kt),
            Some(0.78),
            Some(2.4),
            Some(0.0),
            Some(62_000.0),
            Some(2300.0),
            Some(sat_c),
            Some(90.0),
            Some(5.0),
        ]
    }

    #[test]
    fn conversions_match_hand_values() {
        let raw = RawFlight { flight_id: "t".into(), rows: vec![full_row(35_000.0, -56.5, 450.0)] };
        let si = to_si(&raw).unwrap();
        assert_relative_eq!(si.frame.altitude[0], 10_668.0, max_relative = 1e-12);
        assert_relative_eq!(si.frame.sat[0], 216.65, max_relative = 1e-12);
        assert_relative_eq!(si.frame.tas[0], 450.0 * 0.514444, max_relative = 1e-12);
        assert_relative_eq!(si.frame.fuel_flow[0], 2300.0 / 3600.0, max_relative = 1e-12);
        assert_relative_eq!(
            si.frame.alpha[0],
            2.4_f64.to_radians(),
            max_relative = 1e-12
        );
        assert!(si.frame.rho[0] > 0.3 && si.frame.rho[0] < 0.45);
        assert_eq!(si.dropped_rows, 0);
    }

    #[test]
    fn zero_tas_converts_to_zero() {
        let raw = RawFlight { flight_id: "t".into(), rows: vec![full_row(1000.0, 10.0, 0.0)] };
        let si = to_si(&raw).unwrap();
        assert_eq!(si.frame.tas[0], 0.0);
    }

    #[test]
    fn missing_cell_masks_row_and_counts() {
        let mut row = full_row(35_000.0, -56.5, 450.0);
        row[7] = None;
        let raw =
            RawFlight { flight_id: "t".into(), rows: vec![full_row(35_000.0, -56.5, 450.0), row] };
        let si = to_si(&raw).unwrap();
        assert_eq!(si.dropped_rows, 1);
        assert!(si.frame.valid[0]);
        assert!(!si.frame.valid[1]);
    }

    #[test]
    fn csv_round_trip_through_file() {
        let raw = RawFlight {
            flight_id: "t".into(),
            rows: vec![full_row(35_000.0, -56.5, 450.0), full_row(35_001.0, -56.4, 451.0)],
        };
        let mut si = to_si(&raw).unwrap();
        si.frame.time = vec![0.0, 1.0];
        let dir = std::env::temp_dir().join("aerocoef_ingest_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("flight_rt.csv");
        write_flight_csv(&si.frame, &path).unwrap();
        let back = read_flight_csv(&path).unwrap();
        for i in 0..2 {
            assert_relative_eq!(back.frame.altitude[i], si.frame.altitude[i], max_relative = 1e-12);
            assert_relative_eq!(back.frame.tas[i], si.frame.tas[i], max_relative = 1e-12);
            assert_relative_eq!(back.frame.fuel_flow[i], si.frame.fuel_flow[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let dir = std::env::temp_dir().join("aerocoef_ingest_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad_header.csv");
        std::fs::write(&path, "time,alt\n0,1\n").unwrap();
        assert!(matches!(read_flight_csv(&path), Err(Error::Schema { .. })));
    }

    #[test]
    fn unparsable_cell_reports_row() {
        let dir = std::env::temp_dir().join("aerocoef_ingest_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad_cell.csv");
        std::fs::write(&path, format!("{RAW_HEADER}\n0,oops,1,1,1,1,1,1,1,1,1\n")).unwrap();
        match read_flight_csv(&path) {
            Err(Error::Schema { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected schema error, got {other:?}"),
        }
    }
}
