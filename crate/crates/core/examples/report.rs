//! Full pipeline from a TOML configuration, printed as JSON.

use pinlayer::config::RunConfig;
use pinlayer::report::run_report;

const CONFIG: &str = r#"
[model]
family = "cubic"
s = 0.5

[params]
epsilon = 0.02
D = 1.0
xi = -0.2

[grid]
n = 2048

[simulate]
seed = 11
"#;

fn main() -> pinlayer::Result<()> {
    let cfg = RunConfig::from_toml_str(CONFIG)?;
    let rep = run_report(&cfg)?;
    println!("verdict {:?}, indicators agree: {}", rep.verdict, rep.indicators_agree());
    for (name, v) in &rep.indicators {
        println!("  {name:<11} {v:?}");
    }
    let summary = serde_json::json!({
        "lambda_asymptotic": rep.lambda_asymptotic,
        "lambda_evans": [rep.lambda_evans.re, rep.lambda_evans.im],
        "lambda_direct": [rep.lambda_direct.re, rep.lambda_direct.im],
        "sim_growth_rate": rep.sim_growth_rate,
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    std::process::exit(rep.exit_code());
}
