//! Solar azimuth and elevation over one day.
//!
//! cargo run --example sun_position -- 40.0 -90.0 2024-06-21

use soyfield::render::{sun_direction, utc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let lat: f64 = args.first().map_or(Ok(40.0), |s| s.parse())?;
    let lon: f64 = args.get(1).map_or(Ok(-90.0), |s| s.parse())?;
    let date = args.get(2).cloned().unwrap_or_else(|| "2024-06-21".into());
    let parts: Vec<u32> = date.split('-').map(|p| p.parse()).collect::<Result<_, _>>()?;
    let (y, m, d) = (parts[0] as i32, parts[1], parts[2]);
    println!("lat {lat}, lon {lon}, {date} (UTC)");
    for h in 0..24 {
        let p = sun_direction(lat, lon, utc(y, m, d, h, 0, 0)?)?;
        let bar = "#".repeat((p.elevation.max(0.0) / 2.0) as usize);
        println!("{h:02}:00  az {:>6.1}  el {:>6.1}  {bar}", p.azimuth, p.elevation);
    }
    Ok(())
}
