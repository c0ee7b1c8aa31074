//! How the two radiation models share a waveguide's power among its antennas.

use pinch_multicast::layout::PinchLayout;
use pinch_multicast::radiation::radiation_profile;
use pinch_multicast::{RadiationModel, SystemConfig};

fn main() -> pinch_multicast::Result<()> {
    let base = SystemConfig::default();
    let layout = PinchLayout::uniform(&base)?;
    println!(
        "antenna positions on waveguide 0: {:.3?}",
        layout.positions(0)
    );

    for model in [RadiationModel::Equal, RadiationModel::Proportional] {
        let cfg = SystemConfig {
            radiation_model: model,
            ..base.clone()
        };
        let profile = radiation_profile(&layout, &cfg)?;
        let row = &profile.rows[0];
        println!("\n{} model ({:?})", model.as_str(), row.status);
        println!("  coefficient a_n: {:.4?}", row.coefficient);
        println!("  radiated power:  {:.4?}", row.power);
        println!("  total {:.6} of unit feed", row.total());
    }

    // Heavier attenuation pushes the proportional model towards a shortfall.
    for eps in [0.08, 1.0, 5.0] {
        let cfg = SystemConfig {
            attenuation_db_per_m: eps,
            ..base.clone()
        };
        let row = &radiation_profile(&layout, &cfg)?.rows[0];
        println!(
            "\nattenuation {eps} dB/m: a = {:.4}, total {:.4} ({:?})",
            row.coefficient[0],
            row.total(),
            row.status
        );
    }
    Ok(())
}
