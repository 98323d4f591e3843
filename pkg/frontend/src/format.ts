// Display formatting. The conformance suite compares these exact strings
// against direct API responses, so every panel must render through here.

export function formatMoney(value: number): string {
  return value.toLocaleString("en-US", {
    minimumFractionDigits: 2,
    maximumFractionDigits: 2,
  });
}

export function formatGamma(value: number): string {
  return value.toFixed(5);
}

export function formatAction(action: "deal" | "no_deal"): string {
  return action === "deal" ? "Deal" : "No Deal";
}
