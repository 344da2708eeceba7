package corpus.speculativegenerality.smelly;

public abstract class PluginHook {
    public abstract void onEvent(String name);

    public abstract void onShutdown();
}

class LoggingHook extends PluginHook {
    private int seen;

    public void onEvent(String name) {
        seen++;
    }

    public void onShutdown() {
        seen = 0;
    }

    // kept for a future extension point
    public void reserved() {
    }
}
