//! Builds an experiment in code and runs it as the command-line tool would.

use stoptics::experiment::{run, validate, ExperimentConfig, ExperimentKind};

fn main() -> stoptics::Result<()> {
    let dir = std::env::temp_dir().join("stoptics-example");
    let mut config = ExperimentConfig::parse(
        r#"
kind = "cloak-converge"
[params]
omega = 1.0
l_max = 4
"#,
    )?;
    config.output.dir = Some(dir.clone());
    assert_eq!(config.kind, ExperimentKind::CloakConverge);
    for w in validate(&config)?.warnings {
        println!("warning: {w}");
    }
    let manifest = run(&config)?;
    for stage in &manifest.stages {
        println!("{:<8} {:<6} {:.3} s", stage.name, stage.status, stage.seconds);
    }
    for f in &manifest.files {
        println!("wrote {}", dir.join(f).display());
    }
    Ok(())
}
