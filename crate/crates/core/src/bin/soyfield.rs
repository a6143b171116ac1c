use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use soyfield::dataset::{generate_dataset, load_config, verify_dataset, DatasetError, GeneratorConfig};
use soyfield::geom::{write_obj, ObjObject};
use soyfield::plants::{grow, PlantParams, Species};
use soyfield::render::Channel;

#[derive(Parser)]
#[command(name = "soyfield", version, about = "Synthetic soybean and weed field images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset from a TOML config.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated: rgb,semantic,depth,normal,instance
        #[arg(long, value_delimiter = ',')]
        channels: Option<Vec<Channel>>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-check a generated dataset.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Export one plant as a Wavefront OBJ.
    Preview {
        #[arg(long)]
        species: Species,
        #[arg(long)]
        age: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Directory of `<species>.toml` parameter overrides.
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), DatasetError> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            count,
            out,
            channels,
            jobs,
        } => {
            let mut cfg = match config {
                Some(p) => load_config(&p)?,
                None => GeneratorConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.count = count.unwrap_or(cfg.count);
            cfg.out = out.unwrap_or(cfg.out);
            cfg.channels = channels.unwrap_or(cfg.channels);
            cfg.jobs = jobs.unwrap_or(cfg.jobs);
            let m = generate_dataset(&cfg)?;
            println!(
                "wrote {} scenes to {} (pooled dormancy {:.3})",
                m.scenes.len(),
                cfg.out.display(),
                m.pooled_dormancy()
            );
            Ok(())
        }
        Command::Verify { manifest } => {
            let report = verify_dataset(&manifest)?;
            for v in &report.violations {
                println!("{}: {:?}: {}", v.scene.as_deref().unwrap_or("-"), v.kind, v.message);
            }
            println!("{} scenes, {} violations", report.scenes, report.violations.len());
            if report.is_clean() {
                Ok(())
            } else {
                Err(DatasetError::Config {
                    key: "dataset".into(),
                    message: "verification failed".into(),
                })
            }
        }
        Command::Preview {
            species,
            age,
            seed,
            out,
            params,
        } => {
            let params = match params {
                Some(d) => PlantParams::load_dir(&d)?,
                None => PlantParams::default(),
            };
            let plant = grow(species, age, seed, &params)?;
            let objects: Vec<ObjObject> = plant
                .meshes
                .iter()
                .enumerate()
                .map(|(i, m)| ObjObject {
                    name: format!("{:?}_{i}", m.label).to_lowercase(),
                    mesh: m,
                })
                .collect();
            let file = std::fs::File::create(&out).map_err(|e| DatasetError::Io(format!("{}: {e}", out.display())))?;
            write_obj(&mut std::io::BufWriter::new(file), &objects)
                .map_err(|e| DatasetError::Io(format!("{}: {e}", out.display())))?;
            println!(
                "{species} age {age}: height {:.3} m, {} leaves, {} triangles -> {}",
                plant.height,
                plant.leaf_count,
                plant.triangle_count(),
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
