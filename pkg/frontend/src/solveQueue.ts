// One solve request in flight at a time; newer submissions supersede queued ones.

export class SolveQueue<T> {
  private inFlight = false;
  private pending: T | null = null;

  constructor(private readonly run: (request: T) => Promise<void>) {}

  submit(request: T): void {
    if (this.inFlight) {
      this.pending = request; // replaces any previously queued request
      return;
    }
    void this.drain(request);
  }

  private async drain(request: T): Promise<void> {
    this.inFlight = true;
    let next: T | null = request;
    while (next !== null) {
      const current: T = next;
      this.pending = null;
      try {
        await this.run(current);
      } catch {
        // the runner reports its own errors; the queue only sequences
      }
      next = this.pending;
    }
    this.inFlight = false;
  }
}
